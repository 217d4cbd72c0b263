#include "carnot/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace carnot {

SceneError::SceneError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid scene:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

const DomainConfig* SceneConfig::domain(std::string_view name) const {
  for (const auto& d : domains) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const FieldConfig* SceneConfig::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const std::vector<std::string>& experiment_types() {
  static const std::vector<std::string> types = {"perimeter", "char-scan", "density",        "limits",
                                                 "trace",     "coarea",    "ratio",          "counterexample",
                                                 "symmetry-bound"};
  return types;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  return v;
}

struct KeySet {
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::map<std::string, KeySet>& experiment_keys() {
  static const std::map<std::string, KeySet> keys = {
      {"perimeter", {{"domain"}, {"window"}}},
      {"char-scan", {{"domain"}, {"resolutions", "kappa"}}},
      {"density", {{"domain", "point"}, {"samples", "r0", "count", "ball"}}},
      {"limits", {{"field", "point"}, {"samples", "r0", "count"}}},
      {"trace", {{"field", "domain"}, {"points", "samples", "r0", "count"}}},
      {"coarea", {{"field", "domain", "t_lo", "t_hi"}, {"slices"}}},
      {"ratio", {{"kind", "center", "r"}, {"field", "domain", "samples"}}},
      {"counterexample", {{"eps", "n"}, {}}},
      {"symmetry-bound", {{"domain", "point"}, {"s_lo", "s_hi", "reach"}}},
  };
  return keys;
}

// (i, j, l, value) with 1-based indices.
std::optional<StructureConstant> parse_b(std::string_view text) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') return std::nullopt;
  const auto nums = parse_numbers(std::string_view(t).substr(1, t.size() - 2));
  if (nums.size() != 4) return std::nullopt;
  for (int k = 0; k < 3; ++k) {
    if (nums[k] != static_cast<int>(nums[k]) || nums[k] < 1) return std::nullopt;
  }
  return StructureConstant{static_cast<int>(nums[0]) - 1, static_cast<int>(nums[1]) - 1,
                           static_cast<int>(nums[2]) - 1, nums[3]};
}

struct Section {
  std::string kind;
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> lines;
};

std::string where(const std::string& source, int line) { return source + ":" + std::to_string(line) + ": "; }

void build_group(SceneConfig& scene, const Section& sec, std::vector<std::string>& problems) {
  std::map<std::string, std::string> kv;
  std::vector<std::pair<StructureConstant, int>> bs;
  for (std::size_t k = 0; k < sec.entries.size(); ++k) {
    const auto& [key, value] = sec.entries[k];
    if (key == "b") {
      const auto b = parse_b(value);
      if (!b) {
        problems.push_back(where(scene.source, sec.lines[k]) + "b must read (i, j, l, value) with 1-based indices");
      } else {
        bs.emplace_back(*b, sec.lines[k]);
      }
    } else if (key == "kind" || key == "m" || key == "n" || key == "eps") {
      if (kv.count(key)) problems.push_back(where(scene.source, sec.lines[k]) + "duplicate key '" + key + "'");
      kv[key] = value;
    } else {
      problems.push_back(where(scene.source, sec.lines[k]) + "unknown key '" + key + "' in [group]");
    }
  }
  const std::string at = where(scene.source, sec.line);
  if (!kv.count("kind")) {
    problems.push_back(at + "[group] needs kind");
    return;
  }
  scene.group_kind = kv["kind"];
  auto get_int = [&](const std::string& key, int fallback) {
    if (!kv.count(key)) return fallback;
    try {
      const double v = to_double(kv[key]);
      if (v != static_cast<int>(v) || v < 1) throw std::invalid_argument("");
      return static_cast<int>(v);
    } catch (const std::exception&) {
      problems.push_back(at + key + " must be a positive integer");
      return fallback;
    }
  };
  double eps = 0.5;
  if (kv.count("eps")) {
    try {
      eps = to_double(kv["eps"]);
    } catch (const std::exception& e) {
      problems.push_back(at + "eps: " + e.what());
    }
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream msg;
    msg << at << "eps out of (0,1): " << eps;
    problems.push_back(msg.str());
    eps = 0.5;
  }
  const std::string& kind = scene.group_kind;
  if (kind != "explicit" && !bs.empty()) problems.push_back(at + "b entries are only allowed for kind = explicit");
  try {
    if (kind == "heisenberg") {
      const int m = get_int("m", 2);
      if (m % 2 != 0) problems.push_back(at + "heisenberg needs even m");
      if (get_int("n", 1) != 1) problems.push_back(at + "heisenberg has n = 1");
      scene.group = GroupSpec::heisenberg(std::max(1, m / 2), eps);
    } else if (kind == "htype-quaternion") {
      if (get_int("m", 4) != 4 || get_int("n", 3) != 3) problems.push_back(at + "htype-quaternion has m = 4, n = 3");
      scene.group = GroupSpec::quaternionic(eps);
    } else if (kind == "free-step2") {
      const int m = get_int("m", 3);
      if (m < 2) problems.push_back(at + "free-step2 needs m >= 2");
      if (kv.count("n") && get_int("n", 0) != m * (m - 1) / 2) {
        problems.push_back(at + "free-step2 on m generators has n = m(m-1)/2");
      }
      scene.group = GroupSpec::free_step2(std::max(2, m), eps);
    } else if (kind == "explicit") {
      if (!kv.count("m") || !kv.count("n")) {
        problems.push_back(at + "explicit group needs m and n");
        return;
      }
      const int m = get_int("m", 2);
      const int n = get_int("n", 1);
      std::map<std::tuple<int, int, int>, std::pair<double, int>> given;
      for (const auto& [b, line] : bs) {
        if (b.i >= m || b.j >= m || b.l >= n) {
          std::ostringstream msg;
          msg << where(scene.source, line) << "b(" << b.i + 1 << "," << b.j + 1 << "," << b.l + 1
              << ") out of range for m = " << m << ", n = " << n;
          problems.push_back(msg.str());
          continue;
        }
        if (b.i == b.j && b.value != 0.0) {
          std::ostringstream msg;
          msg << where(scene.source, line) << "antisymmetry: b(" << b.i + 1 << "," << b.j + 1 << "," << b.l + 1
              << ") must vanish";
          problems.push_back(msg.str());
          continue;
        }
        given[{b.i, b.j, b.l}] = {b.value, line};
      }
      std::vector<StructureConstant> constants;
      for (const auto& [key, entry] : given) {
        const auto [i, j, l] = key;
        const auto partner = given.find({j, i, l});
        if (partner != given.end() && partner->second.first != -entry.first) {
          if (i < j) {
            std::ostringstream msg;
            msg << where(scene.source, entry.second) << "antisymmetry: b(" << i + 1 << "," << j + 1 << ","
                << l + 1 << ") = " << entry.first << " but b(" << j + 1 << "," << i + 1 << "," << l + 1
                << ") = " << partner->second.first;
            problems.push_back(msg.str());
          }
          continue;
        }
        constants.push_back({i, j, l, entry.first});
        if (partner == given.end()) constants.push_back({j, i, l, -entry.first});
      }
      scene.group = GroupSpec(m, n, constants, eps);
    } else {
      problems.push_back(at + "unknown group kind '" + kind +
                         "' (heisenberg, htype-quaternion, free-step2, explicit)");
      return;
    }
  } catch (const std::exception& e) {
    problems.push_back(at + e.what());
    return;
  }
  for (const auto& f : validate_spec(scene.group).failures) {
    if (f.rfind("eps", 0) != 0) problems.push_back(at + f);
  }
}

}  // namespace

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(to_double(token));
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return out;
}

std::vector<double> parse_range(std::string_view text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  if (dots == std::string::npos) return parse_numbers(t);
  const double lo = to_double(t.substr(0, dots));
  const double hi = to_double(t.substr(dots + 2));
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("range needs 0 < N1 <= N2");
  std::vector<double> out;
  for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 10.0) out.push_back(v);
  return out;
}

Box parse_box(std::string_view text) {
  std::vector<std::pair<double, double>> axes;
  std::size_t pos = 0;
  const std::string t(text);
  while (true) {
    const auto open = t.find('[', pos);
    if (open == std::string::npos) break;
    const auto close = t.find(']', open);
    if (close == std::string::npos) throw std::invalid_argument("box: unbalanced '['");
    const auto nums = parse_numbers(std::string_view(t).substr(open + 1, close - open - 1));
    if (nums.size() != 2 || !(nums[1] > nums[0])) throw std::invalid_argument("box: each axis reads [lo, hi] with lo < hi");
    axes.emplace_back(nums[0], nums[1]);
    pos = close + 1;
  }
  if (axes.empty()) throw std::invalid_argument("box: expected [lo, hi] x [lo, hi] x ...");
  Box box{Vec(static_cast<int>(axes.size())), Vec(static_cast<int>(axes.size()))};
  for (std::size_t k = 0; k < axes.size(); ++k) {
    box.lo[static_cast<int>(k)] = axes[k].first;
    box.hi[static_cast<int>(k)] = axes[k].second;
  }
  return box;
}

SceneConfig parse_scene(std::string_view text, const std::string& source) {
  SceneConfig scene;
  scene.source = source;
  std::vector<std::string> problems;
  std::vector<Section> sections;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        problems.push_back(where(source, line) + "unterminated section header");
        continue;
      }
      const std::string inner = trim(s.substr(1, s.size() - 2));
      Section sec;
      sec.line = line;
      const auto space = inner.find(' ');
      sec.kind = inner.substr(0, space);
      if (space != std::string::npos) sec.name = trim(inner.substr(space + 1));
      sections.push_back(sec);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where(source, line) + "expected key = value");
      continue;
    }
    if (sections.empty()) {
      problems.push_back(where(source, line) + "entry outside any section");
      continue;
    }
    sections.back().entries.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    sections.back().lines.push_back(line);
  }

  const Section* group = nullptr;
  for (const auto& sec : sections) {
    if (sec.kind == "group") {
      if (group) problems.push_back(where(source, sec.line) + "duplicate [group]");
      group = &sec;
    }
  }
  if (!group) {
    problems.push_back(source + ": missing [group] section");
  } else {
    build_group(scene, *group, problems);
  }
  const int m = scene.group.m();
  const int n = scene.group.n();

  std::set<std::string> labels;
  for (const auto& sec : sections) {
    const std::string at = where(source, sec.line);
    if (sec.kind == "group") continue;
    std::map<std::string, std::string> kv;
    for (std::size_t k = 0; k < sec.entries.size(); ++k) {
      const auto& [key, value] = sec.entries[k];
      if (kv.count(key)) problems.push_back(where(source, sec.lines[k]) + "duplicate key '" + key + "'");
      kv[key] = value;
    }
    if (sec.kind == "domain" || sec.kind == "field") {
      if (sec.name.empty()) {
        problems.push_back(at + "[" + sec.kind + "] needs a name");
        continue;
      }
      if (scene.domain(sec.name) || scene.field(sec.name)) {
        problems.push_back(at + "duplicate name '" + sec.name + "'");
        continue;
      }
    }
    if (sec.kind == "domain") {
      DomainConfig d;
      d.name = sec.name;
      d.line = sec.line;
      for (const auto& [key, value] : kv) {
        if (key != "phi" && key != "bbox" && key != "chart" && key != "region") {
          problems.push_back(at + "unknown key '" + key + "' in domain " + d.name);
        }
      }
      if (!kv.count("phi")) problems.push_back(at + "domain " + d.name + " needs phi");
      if (!kv.count("bbox")) problems.push_back(at + "domain " + d.name + " needs bbox");
      try {
        if (kv.count("phi")) {
          d.phi_text = kv["phi"];
          d.phi = expr::parse(d.phi_text, m, n);
        }
      } catch (const expr::ParseError& e) {
        problems.push_back(at + "domain " + d.name + " phi: " + e.what());
      }
      try {
        if (kv.count("bbox")) {
          d.bbox = parse_box(kv["bbox"]);
          if (d.bbox.dim() != m + n) {
            problems.push_back(at + "domain " + d.name + " bbox needs " + std::to_string(m + n) + " axes");
          }
        }
      } catch (const std::exception& e) {
        problems.push_back(at + "domain " + d.name + " bbox: " + e.what());
      }
      if (kv.count("chart")) d.chart = kv["chart"];
      if (kv.count("region")) d.region = kv["region"];
      scene.domains.push_back(d);
    } else if (sec.kind == "field") {
      FieldConfig f;
      f.name = sec.name;
      f.line = sec.line;
      for (const auto& [key, value] : kv) {
        if (key != "u") problems.push_back(at + "unknown key '" + key + "' in field " + f.name);
      }
      if (!kv.count("u")) {
        problems.push_back(at + "field " + f.name + " needs u");
      } else {
        try {
          f.u_text = kv["u"];
          f.u = expr::parse(f.u_text, m, n);
        } catch (const expr::ParseError& e) {
          problems.push_back(at + "field " + f.name + " u: " + e.what());
        }
      }
      scene.fields.push_back(f);
    } else if (sec.kind == "experiment") {
      ExperimentConfig x;
      x.label = sec.name.empty() ? std::to_string(scene.experiments.size() + 1) : sec.name;
      x.line = sec.line;
      if (!labels.insert(x.label).second) problems.push_back(at + "duplicate experiment '" + x.label + "'");
      if (!kv.count("type")) {
        problems.push_back(at + "experiment " + x.label + " needs type");
        continue;
      }
      x.type = kv["type"];
      const auto keys = experiment_keys().find(x.type);
      if (keys == experiment_keys().end()) {
        problems.push_back(at + "experiment " + x.label + ": unknown type '" + x.type + "'");
        continue;
      }
      if (kv.count("seed")) {
        try {
          const double v = to_double(kv["seed"]);
          if (v < 0 || v != std::floor(v)) throw std::invalid_argument("seed must be a nonnegative integer");
          x.seed = static_cast<std::uint64_t>(v);
        } catch (const std::exception& e) {
          problems.push_back(at + "experiment " + x.label + " seed: " + e.what());
        }
      }
      for (const auto& [key, value] : kv) {
        if (key == "type" || key == "seed") continue;
        if (!keys->second.required.count(key) && !keys->second.optional.count(key)) {
          problems.push_back(at + "experiment " + x.label + ": unknown key '" + key + "' for type " + x.type);
        }
        x.params[key] = value;
      }
      for (const auto& key : keys->second.required) {
        if (!kv.count(key)) problems.push_back(at + "experiment " + x.label + " (" + x.type + ") needs " + key);
      }
      scene.experiments.push_back(x);
    } else {
      problems.push_back(at + "unknown section [" + sec.kind + "]");
    }
  }

  // References and per-type checks.
  for (const auto& x : scene.experiments) {
    const std::string at = where(source, x.line) + "experiment " + x.label + ": ";
    for (const char* key : {"domain", "window"}) {
      const auto it = x.params.find(key);
      if (it != x.params.end() && !scene.domain(it->second)) {
        problems.push_back(at + "undefined domain '" + it->second + "'");
      }
    }
    const auto f = x.params.find("field");
    if (f != x.params.end() && !scene.field(f->second)) problems.push_back(at + "undefined field '" + f->second + "'");
    for (const char* key : {"point", "center"}) {
      const auto it = x.params.find(key);
      if (it == x.params.end()) continue;
      try {
        if (static_cast<int>(parse_numbers(it->second).size()) != m + n) {
          problems.push_back(at + key + " needs " + std::to_string(m + n) + " coordinates");
        }
      } catch (const std::exception& e) {
        problems.push_back(at + key + ": " + e.what());
      }
    }
    if (x.type == "perimeter" || x.type == "char-scan" || x.type == "trace" || x.type == "coarea") {
      const auto it = x.params.find("domain");
      if (it != x.params.end()) {
        const DomainConfig* d = scene.domain(it->second);
        if (d && d->chart.empty()) problems.push_back(at + "domain '" + d->name + "' needs a chart for " + x.type);
      }
    }
    if (x.type == "ratio") {
      const auto kind = x.params.find("kind");
      if (kind != x.params.end()) {
        if (kind->second == "poincare" && !x.params.count("field")) problems.push_back(at + "poincare needs field");
        if (kind->second == "isoperimetric" && !x.params.count("domain")) {
          problems.push_back(at + "isoperimetric needs domain");
        }
        if (kind->second != "poincare" && kind->second != "isoperimetric") {
          problems.push_back(at + "ratio kind must be poincare or isoperimetric");
        }
      }
    }
    if (x.type == "counterexample") {
      try {
        for (double e : parse_numbers(x.params.count("eps") ? x.params.at("eps") : "")) {
          if (!(e >= 0.0 && e < 1.0)) problems.push_back(at + "eps must lie in [0, 1)");
        }
        for (double N : parse_range(x.params.count("n") ? x.params.at("n") : "")) {
          if (!(N >= 1.0)) problems.push_back(at + "n must be >= 1");
        }
      } catch (const std::exception& e) {
        problems.push_back(at + e.what());
      }
    }
    for (const auto& [key, value] : x.params) {
      static const std::set<std::string> numeric = {"samples", "r0",  "count",  "points", "t_lo", "t_hi", "slices",
                                                    "r",       "s_lo", "s_hi", "reach",  "kappa"};
      if (!numeric.count(key)) continue;
      try {
        if (parse_numbers(value).size() != 1) throw std::invalid_argument("expected one number");
      } catch (const std::exception& e) {
        problems.push_back(at + key + ": " + e.what());
      }
    }
  }

  if (problems.empty()) {
    for (const auto& d : scene.domains) {
      try {
        if (!d.chart.empty()) build_chart(scene, d);
        build_region(scene, d);
      } catch (const std::exception& e) {
        problems.push_back(where(source, d.line) + "domain " + d.name + ": " + e.what());
      }
    }
  }
  if (!problems.empty()) throw SceneError(problems);
  return scene;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError({path + ": cannot open"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path);
}

Domain build_domain(const SceneConfig& scene, const DomainConfig& d) {
  return Domain{expr::to_field(d.phi, scene.group), d.bbox, d.name};
}

namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int axis_index(const GroupSpec& spec, const std::string& name) {
  if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
    const int k = std::stoi(name.substr(1)) - 1;
    const int axis = name[0] == 'x' ? k : spec.m() + k;
    if (k >= 0 && ((name[0] == 'x' && k < spec.m()) || (name[0] == 'y' && k < spec.n()))) return axis;
  }
  throw std::invalid_argument("chart: bad axis '" + name + "'");
}

// Rays leaving the vertical axis through (0, y) in first-layer directions.
LineFamily cylinder_rays(const GroupSpec& spec, const Box& second, double rmax) {
  const int m = spec.m();
  const int n = spec.n();
  const int d = m + n;
  if (m < 2) throw std::invalid_argument("cylinder-rays: needs m >= 2");
  const HypersphereMap sphere(m);
  LineFamily fam;
  const Box ang = sphere.angle_box();
  fam.params = Box{Vec(m - 1 + n), Vec(m - 1 + n)};
  fam.params.lo << ang.lo, second.lo;
  fam.params.hi << ang.hi, second.hi;
  fam.tau_lo = 0.0;
  fam.tau_hi = rmax;
  fam.lines = [=](std::span<const double> u, Vec& base, Mat& dbase, Vec& dir, Mat& ddir) {
    const auto angles = u.subspan(0, m - 1);
    base = Vec::Zero(d);
    dbase = Mat::Zero(d, d - 1);
    for (int l = 0; l < n; ++l) {
      base[m + l] = u[m - 1 + l];
      dbase(m + l, m - 1 + l) = 1.0;
    }
    dir = Vec::Zero(d);
    Vec w(m);
    sphere.direction(angles, w);
    dir.head(m) = w;
    ddir = Mat::Zero(d, d - 1);
    Mat dw(m, m - 1);
    sphere.direction_jacobian(angles, dw);
    ddir.block(0, 0, m, m - 1) = dw;
  };
  return fam;
}

double word_number(const std::vector<std::string>& w, std::size_t k, const std::string& chart) {
  if (k >= w.size()) throw std::invalid_argument("chart '" + chart + "': missing argument");
  return to_double(w[k]);
}

}  // namespace

LineFamily build_lines(const SceneConfig& scene, const DomainConfig& d) {
  const GroupSpec& spec = scene.group;
  const auto w = words(d.chart);
  if (w.empty()) throw std::invalid_argument("domain " + d.name + " has no chart");
  const std::string& kind = w[0];
  if (kind == "polar") {
    const int grade = w.size() > 4 ? static_cast<int>(word_number(w, 4, d.chart)) : 1;
    return polar_lines(spec, word_number(w, 1, d.chart), word_number(w, 2, d.chart), word_number(w, 3, d.chart),
                       grade);
  }
  if (kind == "graph") {
    if (w.size() < 4) throw std::invalid_argument("chart '" + d.chart + "': graph AXIS LO HI");
    const int axis = axis_index(spec, w[1]);
    const int dim = spec.dim();
    Box other{Vec(dim - 1), Vec(dim - 1)};
    for (int k = 0, j = 0; k < dim; ++k) {
      if (k == axis) continue;
      other.lo[j] = d.bbox.lo[k];
      other.hi[j++] = d.bbox.hi[k];
    }
    return graph_lines(spec, axis, other, word_number(w, 2, d.chart), word_number(w, 3, d.chart));
  }
  if (kind == "star") return star_lines(spec, identity(spec), word_number(w, 1, d.chart));
  if (kind == "cylinder-rays") {
    Box second{d.bbox.lo.tail(spec.n()), d.bbox.hi.tail(spec.n())};
    return cylinder_rays(spec, second, word_number(w, 1, d.chart));
  }
  throw std::invalid_argument("chart '" + d.chart + "' has no line family");
}

SurfacePatch build_chart(const SceneConfig& scene, const DomainConfig& d) {
  const auto w = words(d.chart);
  if (w.empty()) throw std::invalid_argument("domain " + d.name + " has no chart");
  if (w[0] == "gauge-sphere") return gauge_sphere(scene.group, identity(scene.group), word_number(w, 1, d.chart));
  return implicit_patch(scene.group, build_domain(scene, d).phi, build_lines(scene, d));
}

Region build_region(const SceneConfig& scene, const DomainConfig& d) {
  const GroupSpec& spec = scene.group;
  const auto w = words(d.region);
  if (w.empty() || w[0] == "box") {
    const Domain dom = build_domain(scene, d);
    return Region::box(spec, d.bbox, [dom](const Point& p) { return dom.contains(p); });
  }
  if (w[0] == "gauge") return Region::gauge_ball(spec, identity(spec), word_number(w, 1, d.region));
  if (w[0] == "cylinder") {
    if (spec.n() != 1) throw std::invalid_argument("region cylinder R LO HI needs n = 1");
    Box second{Vec::Constant(1, word_number(w, 2, d.region)), Vec::Constant(1, word_number(w, 3, d.region))};
    return Region::first_layer_cylinder(spec, identity(spec), word_number(w, 1, d.region), second);
  }
  throw std::invalid_argument("region '" + d.region + "': expected box, gauge R or cylinder R LO HI");
}

}  // namespace carnot
