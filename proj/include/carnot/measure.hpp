#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace carnot {

/// A numeric value with its error estimate and how it was obtained. For Monte
/// Carlo results `error` is one standard error and `samples` the sample count;
/// for quadrature `error` is the last refinement delta and `order` the final order.
struct MeasureEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t samples = 0;
  int order = 0;
  bool converged = true;
  /// (samples or order, value) after each refinement step.
  std::vector<std::pair<double, double>> trail;
};

}  // namespace carnot
