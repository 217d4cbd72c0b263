#pragma once

#include "carnot/admissibility.hpp"
#include "carnot/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

/// CSV table; cells are already formatted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits, '.' decimal, no locale.
std::string format_number(double v);
void write_csv(const std::string& path, const Table& table);

/// Columns N, perim_top, perim_side, ratio, F, closed_form, rel_err, with a
/// leading eps column when `with_eps`.
Table counterexample_table(const CounterexampleSweep& sweep, bool with_eps);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_order;       ///< fixed quadrature order for surface and volume integrals
  std::optional<std::size_t> mc_samples;
  bool timing = true;                  ///< false writes runtime 0 so reports are byte-identical
};

struct ExperimentOutcome {
  std::string label;
  std::string type;
  bool ok = false;
  std::string message;
  std::string csv;  ///< file name inside the output directory
};

struct RunSummary {
  std::vector<ExperimentOutcome> outcomes;
  bool ok() const;
};

/// Runs every experiment in order, writing NN_type.csv per experiment and
/// summary.json into out_dir (created if needed).
RunSummary run_report(const SceneConfig& scene, const std::string& out_dir, const RunOptions& opts = {});

}  // namespace carnot
