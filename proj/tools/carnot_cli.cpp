// carnot: validate and run scene files, sweep the C^{1,alpha} counterexample.

#include "carnot/admissibility.hpp"
#include "carnot/report.hpp"
#include "carnot/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

int cmd_validate(const std::string& path) {
  try {
    const carnot::SceneConfig scene = carnot::load_scene(path);
    std::cout << path << ": ok (" << scene.group_kind << ", m=" << scene.group.m() << ", n=" << scene.group.n()
              << ", eps=" << scene.group.eps() << "; " << scene.domains.size() << " domain(s), "
              << scene.fields.size() << " field(s), " << scene.experiments.size() << " experiment(s))\n";
    return 0;
  } catch (const carnot::SceneError& e) {
    for (const auto& p : e.problems()) std::cerr << p << '\n';
    return 1;
  }
}

int cmd_run(const std::string& path, const std::string& out, const carnot::RunOptions& opts) {
  carnot::SceneConfig scene;
  try {
    scene = carnot::load_scene(path);
  } catch (const carnot::SceneError& e) {
    for (const auto& p : e.problems()) std::cerr << p << '\n';
    return 1;
  }
  const carnot::RunSummary summary = carnot::run_report(scene, out, opts);
  for (const auto& o : summary.outcomes) {
    std::cout << "[" << (o.ok ? "ok" : "FAILED") << "] " << o.label << " " << o.type;
    if (!o.ok) std::cout << ": " << o.message;
    std::cout << '\n';
  }
  return summary.ok() ? 0 : 2;
}

int cmd_sweep(const std::string& eps_text, const std::string& n_text, const std::string& out, int quad_order) {
  std::vector<double> eps;
  std::vector<double> Ns;
  try {
    eps = carnot::parse_numbers(eps_text);
    Ns = carnot::parse_range(n_text);
  } catch (const std::exception& e) {
    std::cerr << "sweep-counterexample: " << e.what() << '\n';
    return 1;
  }
  carnot::QuadratureOptions quad;
  if (quad_order > 0) quad.fixed_order = quad_order;
  carnot::CounterexampleSweep sweep;
  try {
    sweep = carnot::counterexample_sweep(eps, Ns, quad);
  } catch (const std::invalid_argument& e) {
    std::cerr << "sweep-counterexample: " << e.what() << '\n';
    return 1;
  }
  std::filesystem::create_directories(out);
  carnot::write_csv((std::filesystem::path(out) / "counterexample.csv").string(),
                    carnot::counterexample_table(sweep, true));
  nlohmann::ordered_json root;
  root["experiment"] = "counterexample-sweep";
  root["inputs"] = {{"eps", eps}, {"n", Ns}};
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    per.push_back({{"eps", eps[i]},
                   {"slope", sweep.slopes[i]},
                   {"slope_target", eps[i] / (2.0 - eps[i])},
                   {"prefactor", sweep.prefactors[i]},
                   {"prefactor_substitution", (2.0 - eps[i]) / (3.0 - eps[i])},
                   {"prefactor_lhospital", (2.0 - eps[i]) / 3.0}});
  }
  root["values"] = per;
  std::ofstream((std::filesystem::path(out) / "summary.json").string(), std::ios::binary) << root.dump(2) << '\n';
  for (std::size_t i = 0; i < eps.size(); ++i) {
    std::cout << "eps=" << eps[i] << " slope=" << sweep.slopes[i] << " (target " << eps[i] / (2.0 - eps[i])
              << ") prefactor=" << sweep.prefactors[i] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Step-2 Carnot group toolkit: H-perimeter, densities, traces and admissibility experiments"};
  app.require_subcommand(1);

  std::string scene_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a scene file");
  validate->add_option("scene", scene_path, "Scene file")->required();

  std::string out_dir;
  std::uint64_t seed = 0;
  int quad_order = 0;
  std::size_t mc_samples = 0;
  bool no_timing = false;
  auto* run = app.add_subcommand("run", "Run every experiment of a scene");
  run->add_option("scene", scene_path, "Scene file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override every experiment seed");
  auto* quad_opt = run->add_option("--quad-order", quad_order, "Fixed Gauss-Legendre order")->check(CLI::PositiveNumber);
  auto* mc_opt = run->add_option("--mc-samples", mc_samples, "Monte Carlo samples per estimate")->check(CLI::Range(1000, 1 << 30));
  run->add_flag("--no-timing", no_timing, "Write runtime 0 so that reports are byte-identical");

  std::string eps_text;
  std::string n_text;
  auto* sweep = app.add_subcommand("sweep-counterexample", "Counterexample table over eps x N");
  sweep->add_option("--eps", eps_text, "Comma-separated deficits in [0, 1)")->required();
  sweep->add_option("--n", n_text, "N1..N2 (decades) or a comma-separated list")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--quad-order", quad_order, "Fixed Gauss-Legendre order")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*validate) return cmd_validate(scene_path);
  if (*run) {
    carnot::RunOptions opts;
    if (*seed_opt) opts.seed = seed;
    if (*quad_opt) opts.quad_order = quad_order;
    if (*mc_opt) opts.mc_samples = mc_samples;
    opts.timing = !no_timing;
    return cmd_run(scene_path, out_dir, opts);
  }
  return cmd_sweep(eps_text, n_text, out_dir, quad_order);
}
