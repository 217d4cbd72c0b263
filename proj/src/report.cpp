#include "carnot/report.hpp"

#include "carnot/gmt.hpp"
#include "carnot/parallel.hpp"
#include "carnot/variation.hpp"

#include <json.hpp>

#include <chrono>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace carnot {

using Json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

Table counterexample_table(const CounterexampleSweep& sweep, bool with_eps) {
  Table t;
  if (with_eps) t.header.push_back("eps");
  for (const char* h : {"N", "perim_top", "perim_side", "ratio", "F", "closed_form", "rel_err"}) t.header.push_back(h);
  for (const auto& r : sweep.rows) {
    std::vector<std::string> row;
    if (with_eps) row.push_back(format_number(r.deficit));
    for (double v : {r.N, r.perim_top.value, r.perim_side.value, r.ratio, r.F, r.closed_form, r.rel_err}) {
      row.push_back(format_number(v));
    }
    t.rows.push_back(row);
  }
  return t;
}

bool RunSummary::ok() const {
  for (const auto& o : outcomes) {
    if (!o.ok) return false;
  }
  return true;
}

namespace {

// JSON cannot hold inf or nan.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Point point_from(const GroupSpec& spec, const std::string& text) {
  const auto v = parse_numbers(text);
  Vec c(static_cast<int>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) c[static_cast<int>(k)] = v[k];
  if (c.size() != spec.dim()) throw std::invalid_argument("point has the wrong dimension");
  return Point(spec.m(), c);
}

double param(const ExperimentConfig& x, const std::string& key, double fallback) {
  const auto it = x.params.find(key);
  if (it == x.params.end()) return fallback;
  return parse_numbers(it->second).at(0);
}

struct Context {
  const SceneConfig& scene;
  const ExperimentConfig& x;
  const RunOptions& opts;
  std::uint64_t seed;
  QuadratureOptions quad;
  Json values = Json::object();
  Json errors = Json::object();
  Table table;

  std::size_t samples(std::size_t fallback) const {
    if (opts.mc_samples) return *opts.mc_samples;
    return static_cast<std::size_t>(param(x, "samples", static_cast<double>(fallback)));
  }

  DensityOptions density_options() const {
    DensityOptions d;
    d.radii = default_radii(param(x, "r0", 1.0), static_cast<int>(param(x, "count", 7)));
    d.samples = samples(100000);
    d.seed = seed;
    return d;
  }

  const DomainConfig& domain(const std::string& key = "domain") const { return *scene.domain(x.params.at(key)); }
  const FieldConfig& field() const { return *scene.field(x.params.at("field")); }

  std::vector<std::string> coords_header() const {
    std::vector<std::string> h;
    for (int i = 0; i < scene.group.m(); ++i) h.push_back("x" + std::to_string(i + 1));
    for (int l = 0; l < scene.group.n(); ++l) h.push_back("y" + std::to_string(l + 1));
    return h;
  }
};

void add_coords(std::vector<std::string>& row, const Point& p) {
  for (int k = 0; k < p.dim(); ++k) row.push_back(format_number(p[k]));
}

void run_perimeter(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const SurfacePatch patch = build_chart(c.scene, c.domain());
  Window window;
  if (c.x.params.count("window")) {
    const Domain w = build_domain(c.scene, c.domain("window"));
    window = [w](const Point& p) { return w.contains(p); };
  }
  const MeasureEstimate h = h_perimeter(spec, patch, window, c.quad);
  const MeasureEstimate e = euclidean_area(spec, patch, window, c.quad);
  c.values["h_perimeter"] = number(h.value);
  c.values["euclidean_area"] = number(e.value);
  c.values["order"] = h.order;
  c.values["converged"] = h.converged;
  c.errors["h_perimeter"] = number(h.error);
  c.errors["euclidean_area"] = number(e.error);
  c.table.header = {"order", "h_perimeter"};
  for (const auto& [order, value] : h.trail) c.table.rows.push_back({format_number(order), format_number(value)});
}

void run_char_scan(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const DomainConfig& d = c.domain();
  const Domain dom = build_domain(c.scene, d);
  const SurfacePatch patch = build_chart(c.scene, d);
  std::vector<double> resolutions = {8, 16, 32, 64};
  if (c.x.params.count("resolutions")) resolutions = parse_numbers(c.x.params.at("resolutions"));
  const double kappa = param(c.x, "kappa", 2.0);
  c.table.header = {"resolution", "cluster"};
  for (const auto& h : c.coords_header()) c.table.header.push_back(h);
  Json fractions = Json::array();
  Json clusters = Json::array();
  for (double r : resolutions) {
    const CharacteristicScan scan = characteristic_scan(spec, dom, patch, static_cast<int>(r), kappa);
    fractions.push_back(number(scan.flagged_fraction));
    Json cl = Json::array();
    for (const auto& cluster : scan.clusters) {
      Json one;
      Json centroid = Json::array();
      for (int k = 0; k < cluster.centroid.dim(); ++k) centroid.push_back(number(cluster.centroid[k]));
      one["centroid"] = centroid;
      one["count"] = cluster.count;
      one["radius"] = number(cluster.radius);
      cl.push_back(one);
    }
    clusters.push_back(cl);
    // Cluster index by nearest centroid.
    for (const Point& p : scan.points) {
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < scan.clusters.size(); ++k) {
        const double dd = (scan.clusters[k].centroid.coords() - p.coords()).norm();
        if (dd < dist) {
          dist = dd;
          best = k;
        }
      }
      std::vector<std::string> row = {format_number(r), std::to_string(best)};
      add_coords(row, p);
      c.table.rows.push_back(row);
    }
  }
  Json res = Json::array();
  for (double r : resolutions) res.push_back(r);
  c.values["resolutions"] = res;
  c.values["flagged_fraction"] = fractions;
  c.values["clusters"] = clusters;
}

void run_density(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const Domain dom = build_domain(c.scene, c.domain());
  DensityOptions d = c.density_options();
  const auto ball = c.x.params.count("ball") ? c.x.params.at("ball") : std::string("box-d");
  if (ball == "gauge") {
    d.kind = BallKind::gauge;
  } else if (ball != "box-d") {
    throw std::invalid_argument("ball must be box-d or gauge");
  }
  const Point x = point_from(spec, c.x.params.at("point"));
  const DensityProfile prof = density(spec, [&](const Point& p) { return dom.contains(p); }, x, d);
  c.table.header = {"radius", "density", "stderr"};
  std::vector<double> vals;
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    c.table.rows.push_back(
        {format_number(prof.radii[k]), format_number(prof.values[k].value), format_number(prof.values[k].error)});
    vals.push_back(prof.values[k].value);
  }
  c.values["density_smallest_radius"] = number(prof.extrapolated);
  c.values["vanishes"] = density_vanishes(vals);
  c.errors["density_smallest_radius"] = number(prof.values.back().error);
}

void limits_columns(Table& t) {
  for (const char* h : {"mu", "lambda", "U", "is_jump", "resolved"}) t.header.push_back(h);
}

void limits_cells(std::vector<std::string>& row, const ApproxLimits& l) {
  row.push_back(format_number(l.mu));
  row.push_back(format_number(l.lambda));
  row.push_back(format_number(l.U));
  row.push_back(l.is_jump ? "1" : "0");
  row.push_back(l.resolved ? "1" : "0");
}

void run_limits(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const ScalarField u = expr::to_field(c.field().u, spec);
  LimitOptions lo;
  lo.density = c.density_options();
  const Point x = point_from(spec, c.x.params.at("point"));
  const ApproxLimits l = approx_limits(spec, u.eval, x, lo);
  limits_columns(c.table);
  std::vector<std::string> row;
  limits_cells(row, l);
  c.table.rows.push_back(row);
  c.values["mu"] = number(l.mu);
  c.values["lambda"] = number(l.lambda);
  c.values["U"] = number(l.U);
  c.values["is_jump"] = l.is_jump;
  c.values["resolved"] = l.resolved;
}

void run_trace(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const DomainConfig& d = c.domain();
  const Domain dom = build_domain(c.scene, d);
  const SurfacePatch patch = build_chart(c.scene, d);
  const ScalarField u = expr::to_field(c.field().u, spec);
  LimitOptions lo;
  lo.density = c.density_options();
  const int want = static_cast<int>(param(c.x, "points", 20));

  // Boundary samples at random chart parameters, skipping near-characteristic points.
  std::mt19937_64 rng(c.seed);
  const Box& box = patch.params();
  std::vector<Point> points;
  SurfaceSample s;
  Vec uvec(box.dim());
  for (int attempt = 0; attempt < 100 * want && static_cast<int>(points.size()) < want; ++attempt) {
    for (int k = 0; k < box.dim(); ++k) {
      uvec[k] = std::uniform_real_distribution<double>(box.lo[k], box.hi[k])(rng);
    }
    if (!patch.sample(std::span<const double>(uvec.data(), uvec.size()), s)) continue;
    if (!(std::abs(dom.phi(s.point)) < 1e-8)) continue;
    const double g = dom.phi.gradient(s.point).norm();
    if (h_gradient(spec, dom.phi, s.point).norm() < 0.05 * g) continue;
    points.push_back(s.point);
  }

  c.table.header = c.coords_header();
  limits_columns(c.table);
  c.table.header.push_back("trace");
  c.table.header.push_back("flagged");
  int flagged = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    LimitOptions here = lo;
    here.density.seed = derive_seed(c.seed, k);
    const TraceResult t = trace_at(spec, u.eval, dom, points[k], here);
    std::vector<std::string> row;
    add_coords(row, points[k]);
    limits_cells(row, t.limits);
    row.push_back(format_number(t.value));
    row.push_back(t.flagged ? "1" : "0");
    c.table.rows.push_back(row);
    if (t.flagged) ++flagged;
    worst = std::max(worst, std::abs(t.value - u(points[k])));
  }
  c.values["points"] = points.size();
  c.values["flagged"] = flagged;
  c.values["max_abs_trace_minus_u"] = number(worst);
}

void run_coarea(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const DomainConfig& d = c.domain();
  const Domain dom = build_domain(c.scene, d);
  const ScalarField u = expr::to_field(c.field().u, spec);
  const Region region = build_region(c.scene, d);
  const LevelSets levels =
      implicit_level_sets(spec, u, build_lines(c.scene, d), [dom](const Point& p) { return dom.contains(p); });
  const CoareaReport r = coarea_check(spec, u, region, levels, param(c.x, "t_lo", 0.0), param(c.x, "t_hi", 1.0),
                                      static_cast<int>(param(c.x, "slices", 64)), c.quad);
  c.table.header = {"lhs", "rhs", "rhs_coarse", "gap"};
  c.table.rows.push_back({format_number(r.lhs), format_number(r.rhs), format_number(r.rhs_coarse), format_number(r.gap)});
  c.values["lhs"] = number(r.lhs);
  c.values["rhs"] = number(r.rhs);
  c.values["gap"] = number(r.gap);
  c.errors["lhs"] = number(r.lhs_estimate.error);
  c.errors["rhs"] = number(std::abs(r.rhs - r.rhs_coarse));
}

void run_ratio(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const Point center = point_from(spec, c.x.params.at("center"));
  const double r = param(c.x, "r", 1.0);
  const std::string kind = c.x.params.at("kind");
  RatioReport rep;
  if (kind == "poincare") {
    rep = poincare_report(spec, expr::to_field(c.field().u, spec), center, r, c.quad);
  } else {
    const DomainConfig& d = c.domain();
    const Domain dom = build_domain(c.scene, d);
    rep = isoperimetric_report(spec, [dom](const Point& p) { return dom.contains(p); }, build_chart(c.scene, d), center,
                               r, c.samples(1000000), c.seed, c.quad);
  }
  c.table.header = {"kind", "ratio", "numerator", "denominator", "defined"};
  c.table.rows.push_back({kind, format_number(rep.value), format_number(rep.numerator), format_number(rep.denominator),
                          rep.defined ? "1" : "0"});
  c.values["ratio"] = number(rep.value);
  c.values["numerator"] = number(rep.numerator);
  c.values["denominator"] = number(rep.denominator);
  c.values["defined"] = rep.defined;
  if (!rep.note.empty()) c.values["note"] = rep.note;
}

void run_counterexample(Context& c) {
  const auto eps = parse_numbers(c.x.params.at("eps"));
  const auto Ns = parse_range(c.x.params.at("n"));
  const CounterexampleSweep sweep = counterexample_sweep(eps, Ns, c.quad);
  c.table = counterexample_table(sweep, eps.size() > 1);
  Json slopes = Json::array();
  Json pre = Json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    slopes.push_back(number(sweep.slopes[i]));
    pre.push_back(number(sweep.prefactors[i]));
  }
  double worst = 0.0;
  for (const auto& r : sweep.rows) worst = std::max(worst, r.rel_err);
  c.values["slope"] = slopes;
  Json target = Json::array();
  for (double e : eps) target.push_back(number(e / (2.0 - e)));
  c.values["slope_target"] = target;
  c.values["prefactor"] = pre;
  c.errors["max_rel_err_top"] = number(worst);
}

void run_symmetry_bound(Context& c) {
  const GroupSpec& spec = c.scene.group;
  const Domain dom = build_domain(c.scene, c.domain());
  const Point P = point_from(spec, c.x.params.at("point"));
  ProbeRegion probes;
  probes.s_lo = param(c.x, "s_lo", 1e-3);
  probes.s_hi = param(c.x, "s_hi", 0.5);
  if (spec.n() > 1) {
    probes.y_box = Box{Vec::Constant(spec.n() - 1, -probes.s_hi), Vec::Constant(spec.n() - 1, probes.s_hi)};
  }
  const GraphProfile profile = profile_from_domain(spec, dom, P, param(c.x, "reach", 0.5));
  const SymmetryBound b = partial_symmetry_bound(spec, profile, probes);
  c.table.header = {"M", "L", "bound", "tight_bound", "sup_quotient", "quotient_slope", "satisfied"};
  c.table.rows.push_back({format_number(b.M), format_number(b.L), format_number(b.bound), format_number(b.tight_bound),
                          format_number(b.sup_quotient), format_number(b.quotient_slope), b.satisfied ? "1" : "0"});
  c.values["M"] = number(b.M);
  c.values["L"] = number(b.L);
  c.values["bound"] = number(b.bound);
  c.values["tight_bound"] = number(b.tight_bound);
  c.values["verdict"] = b.verdict;
  if (!b.warning.empty()) c.values["warning"] = b.warning;
}

std::string padded(std::size_t k) {
  std::string s = std::to_string(k);
  return s.size() < 2 ? "0" + s : s;
}

}  // namespace

RunSummary run_report(const SceneConfig& scene, const std::string& out_dir, const RunOptions& opts) {
  std::filesystem::create_directories(out_dir);
  RunSummary summary;
  Json experiments = Json::array();
  for (std::size_t k = 0; k < scene.experiments.size(); ++k) {
    const ExperimentConfig& x = scene.experiments[k];
    Context c{scene, x, opts, opts.seed.value_or(x.seed), {}, {}, {}, {}};
    if (opts.quad_order) c.quad.fixed_order = *opts.quad_order;
    ExperimentOutcome outcome;
    outcome.label = x.label;
    outcome.type = x.type;
    outcome.csv = padded(k + 1) + "_" + x.type + ".csv";

    const auto start = std::chrono::steady_clock::now();
    try {
      if (x.type == "perimeter") run_perimeter(c);
      else if (x.type == "char-scan") run_char_scan(c);
      else if (x.type == "density") run_density(c);
      else if (x.type == "limits") run_limits(c);
      else if (x.type == "trace") run_trace(c);
      else if (x.type == "coarea") run_coarea(c);
      else if (x.type == "ratio") run_ratio(c);
      else if (x.type == "counterexample") run_counterexample(c);
      else if (x.type == "symmetry-bound") run_symmetry_bound(c);
      else throw std::invalid_argument("unknown experiment type " + x.type);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.message = e.what();
    }
    const double runtime =
        opts.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
    // Partial tables are kept on failure.
    if (!c.table.header.empty()) write_csv((std::filesystem::path(out_dir) / outcome.csv).string(), c.table);

    Json entry;
    entry["experiment"] = x.label;
    entry["type"] = x.type;
    Json inputs = Json::object();
    for (const auto& [key, value] : x.params) inputs[key] = value;
    entry["inputs"] = inputs;
    entry["values"] = c.values;
    entry["errors"] = c.errors;
    entry["seed"] = c.seed;
    entry["runtime"] = runtime;
    entry["status"] = outcome.ok ? "ok" : "failed";
    if (!outcome.ok) entry["message"] = outcome.message;
    entry["csv"] = c.table.header.empty() ? Json(nullptr) : Json(outcome.csv);
    experiments.push_back(entry);
    summary.outcomes.push_back(outcome);
  }
  Json root;
  root["group"] = {{"kind", scene.group_kind}, {"m", scene.group.m()}, {"n", scene.group.n()}, {"eps", scene.group.eps()}};
  root["experiments"] = experiments;
  root["status"] = summary.ok() ? "ok" : "failed";
  std::ofstream out((std::filesystem::path(out_dir) / "summary.json").string(), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary.json in " + out_dir);
  out << root.dump(2) << '\n';
  return summary;
}

}  // namespace carnot
