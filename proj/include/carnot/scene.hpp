#pragma once

#include "carnot/expr.hpp"
#include "carnot/geometry.hpp"
#include "carnot/group.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

class SceneError : public std::runtime_error {
 public:
  explicit SceneError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct DomainConfig {
  std::string name;
  std::string phi_text;
  expr::Expression phi;
  Box bbox;
  /// Boundary chart: "polar R lo hi [grade]", "graph AXIS lo hi", "star RMAX",
  /// "cylinder-rays RMAX" or "gauge-sphere R". Empty when absent.
  std::string chart;
  /// Volume chart: "box" (default), "gauge R" or "cylinder R LO HI".
  std::string region = "box";
  int line = 0;
};

struct FieldConfig {
  std::string name;
  std::string u_text;
  expr::Expression u;
  int line = 0;
};

struct ExperimentConfig {
  std::string label;
  std::string type;
  std::map<std::string, std::string> params;  ///< everything except type and seed
  std::uint64_t seed = 1;
  int line = 0;
};

struct SceneConfig {
  std::string source;
  std::string group_kind;
  GroupSpec group = GroupSpec::heisenberg(1);
  std::vector<DomainConfig> domains;
  std::vector<FieldConfig> fields;
  std::vector<ExperimentConfig> experiments;

  const DomainConfig* domain(std::string_view name) const;
  const FieldConfig* field(std::string_view name) const;
};

/// Parses the section format; all problems are collected and thrown together.
SceneConfig parse_scene(std::string_view text, const std::string& source = "<scene>");
SceneConfig load_scene(const std::string& path);

/// Experiment types understood by run_report.
const std::vector<std::string>& experiment_types();

/// "[a, b] x [c, d] x ..." into a box.
Box parse_box(std::string_view text);
/// Comma or whitespace separated numbers.
std::vector<double> parse_numbers(std::string_view text);
/// "N1..N2" (decades from N1 to N2) or a list of numbers.
std::vector<double> parse_range(std::string_view text);

Domain build_domain(const SceneConfig& scene, const DomainConfig& d);
/// Boundary patch from the domain's chart; throws std::invalid_argument without one.
SurfacePatch build_chart(const SceneConfig& scene, const DomainConfig& d);
/// Volume chart of {phi < 0} from the domain's region.
Region build_region(const SceneConfig& scene, const DomainConfig& d);
/// Line family underlying the chart (not for gauge-sphere charts).
LineFamily build_lines(const SceneConfig& scene, const DomainConfig& d);

}  // namespace carnot
