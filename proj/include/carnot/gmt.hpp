#pragma once

#include "carnot/geometry.hpp"
#include "carnot/metrics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

using Predicate = std::function<bool(const Point&)>;

/// r0 * 2^{-k}, k = 0..count-1.
std::vector<double> default_radii(double r0 = 1.0, int count = 7);

struct DensityOptions {
  std::vector<double> radii;  ///< strictly decreasing; empty means default_radii()
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  BallKind kind = BallKind::box_d;
};

struct DensityProfile {
  Point point;
  std::vector<double> radii;
  std::vector<MeasureEstimate> values;
  double extrapolated = 0.0;  ///< value at the smallest radius
};

/// |E cap B(x,r)| / |B(x,r)| per radius by Monte Carlo. Radius k uses the seed
/// stream derive_seed(seed, k). Throws for samples < 1000 or non-decreasing radii.
DensityProfile density(const GroupSpec& spec, const Predicate& E, const Point& x, const DensityOptions& opts = {});

/// Finite-sample reading of "density zero": below 0.01 at the smallest radius and
/// non-increasing over the last three radii.
bool density_vanishes(const std::vector<double>& values);
bool density_vanishes(const DensityProfile& profile);

struct AveragedNormal {
  std::vector<double> radii;
  std::vector<double> values;  ///< |int nu d|dE|_H| / |dE|_H(B(x,r))
  bool monotone = true;        ///< non-decreasing as r shrinks
};

using PatchFactory = std::function<SurfacePatch(double radius)>;

/// Perimeter-averaged horizontal normal over B(x, r), with the patch for each
/// radius supplied by `patches`. Throws on non-decreasing radii and (via
/// horizontal_normal) at characteristic x.
AveragedNormal averaged_normal(const GroupSpec& spec, const Domain& dom, const PatchFactory& patches,
                               const Point& x, const std::vector<double>& radii,
                               const QuadratureOptions& opts = {});

struct LimitOptions {
  DensityOptions density;
  /// Ascending thresholds; empty means 1001 points across the sampled range of u.
  std::vector<double> t_grid;
  /// mu - lambda above this fraction of the sampled range of u counts as a jump.
  double jump_tol = 0.1;
};

struct ApproxLimits {
  double mu = std::numeric_limits<double>::infinity();
  double lambda = -std::numeric_limits<double>::infinity();
  double U = 0.0;
  bool is_jump = false;
  bool resolved = true;
  /// Where the vanishing pattern along the grid was not monotone, the bracket.
  std::pair<double, double> mu_interval;
  std::pair<double, double> lambda_interval;
};

/// mu = inf{t : D({u > t}, x) = 0}, lambda = sup{t : D({u < t}, x) = 0}, with
/// density zero read by density_vanishes on samples shared across thresholds.
ApproxLimits approx_limits(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Point& x,
                           const LimitOptions& opts = {});

struct TraceResult {
  double value = 0.0;
  ApproxLimits limits;
  bool flagged = false;
  std::string message;
};

/// u* = mu + lambda of the zero extension of u outside dom. Flags the point when
/// neither limit is within zero_tol of 0. Requires |phi(x)| < 1e-6.
TraceResult trace_at(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Domain& dom,
                     const Point& x, const LimitOptions& opts = {}, double zero_tol = 0.02);

struct BlowupOptions {
  DensityOptions density;
  QuadratureOptions quadrature;
  /// Patch covering B(p, r); when empty no perimeter ratios are computed.
  PatchFactory patches;
  /// Optional function for the half-space means and the ball kind they use.
  std::function<double(const Point&)> u;
  BallKind mean_kind = BallKind::gauge;
};

struct BlowupProfile {
  std::vector<double> radii;
  Vec normal;  ///< inward horizontal normal of E at p
  std::vector<MeasureEstimate> inside_minus;   ///< E cap tau_p S^-
  std::vector<MeasureEstimate> outside_plus;   ///< E^c cap tau_p S^+
  std::vector<MeasureEstimate> perimeter_ratio;  ///< |dE|_H(B(p,r)) / r^{Q-1}
  /// Means of |u - mu|^{Q/(Q-1)} over B cap S^- and |u - lambda|^{Q/(Q-1)} over B cap S^+.
  std::vector<MeasureEstimate> mean_minus;
  std::vector<MeasureEstimate> mean_plus;
  ApproxLimits limits;
};

/// Blow-up at a non-characteristic boundary point p of E = dom: mismatch densities
/// against the translated half-spaces, the perimeter ratio, and optional
/// half-space means of u.
BlowupProfile blowup_profile(const GroupSpec& spec, const Domain& dom, const Point& p, const BlowupOptions& opts = {});

}  // namespace carnot
