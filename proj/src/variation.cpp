#include "carnot/variation.hpp"

#include "carnot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carnot {

std::string to_string(VariationMethod method) {
  switch (method) {
    case VariationMethod::smooth_integral:
      return "smooth-integral";
    case VariationMethod::sup_dictionary:
      return "sup-dictionary";
    case VariationMethod::coarea_slices:
      return "coarea-slices";
  }
  return "unknown";
}

std::string FieldWitness::describe() const {
  std::ostringstream out;
  out << "width=" << width;
  for (const auto& t : terms) out << "; " << t.coef << "*m" << t.monomial << "*e" << t.component + 1;
  return out.str();
}

VariationReport var_h_smooth(const GroupSpec& spec, const ScalarField& u, const Region& omega,
                             const QuadratureOptions& opts) {
  VariationReport report;
  report.method = VariationMethod::smooth_integral;
  report.estimate = integrate_region(omega, [&](const Point& p) { return h_gradient(spec, u, p).norm(); }, opts);
  report.value = report.estimate.value;
  report.error = report.estimate.error;
  return report;
}

int monomial_count(int d) { return 1 + d + d * (d + 1) / 2; }

double monomial(int k, const Vec& z, Vec* grad) {
  const int d = static_cast<int>(z.size());
  if (grad) grad->setZero(d);
  if (k == 0) return 1.0;
  if (k <= d) {
    if (grad) (*grad)[k - 1] = 1.0;
    return z[k - 1];
  }
  int idx = d + 1;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b, ++idx) {
      if (idx != k) continue;
      if (grad) {
        (*grad)[a] += z[b];
        (*grad)[b] += z[a];
      }
      return z[a] * z[b];
    }
  }
  throw std::out_of_range("monomial: index out of range");
}

namespace {

// Quintic smoothstep on [0, 1].
double smoothstep(double x, double* dx) {
  if (x <= 0.0) {
    *dx = 0.0;
    return 0.0;
  }
  if (x >= 1.0) {
    *dx = 0.0;
    return 1.0;
  }
  *dx = 30.0 * x * x * (x - 1.0) * (x - 1.0);
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

// Plateau on [-1, 1] rising over [-1, -1 + 2w] and falling over [1 - 2w, 1].
double plateau(double z, double w, double* dz) {
  const double band = 2.0 * w;
  if (z <= -1.0 || z >= 1.0) {
    *dz = 0.0;
    return 0.0;
  }
  double d = 0.0;
  if (z < -1.0 + band) {
    const double v = smoothstep((z + 1.0) / band, &d);
    *dz = d / band;
    return v;
  }
  if (z > 1.0 - band) {
    const double v = smoothstep((1.0 - z) / band, &d);
    *dz = -d / band;
    return v;
  }
  *dz = 0.0;
  return 1.0;
}

struct Dictionary {
  const GroupSpec* spec;
  Box box;
  Vec center;
  Vec half;

  // Normalized field and its Euclidean Jacobian at p.
  void field(const FieldWitness& w, const Point& p, Vec& phi, Mat& jac) const {
    const int m = spec->m();
    const int d = spec->dim();
    Vec z(d), db(d);
    for (int k = 0; k < d; ++k) z[k] = (p[k] - center[k]) / half[k];
    Vec bz(d), dbz(d);
    double bump = 1.0;
    for (int k = 0; k < d; ++k) {
      double dd = 0.0;
      bz[k] = plateau(z[k], w.width, &dd);
      dbz[k] = dd;
      bump *= bz[k];
    }
    phi = Vec::Zero(m);
    jac = Mat::Zero(m, d);
    if (bump == 0.0) return;
    for (int k = 0; k < d; ++k) {
      double others = 1.0;
      for (int j = 0; j < d; ++j) {
        if (j != k) others *= bz[j];
      }
      db[k] = dbz[k] * others / half[k];
    }
    Vec mg(d);
    for (const auto& t : w.terms) {
      const double mv = monomial(t.monomial, z, &mg);
      phi[t.component] += t.coef * mv * bump;
      for (int k = 0; k < d; ++k) {
        jac(t.component, k) += t.coef * (mg[k] / half[k] * bump + mv * db[k]);
      }
    }
    // Every monomial and the bump are bounded by 1 on the box, so dividing by
    // this bound keeps |phi| <= 1 without the kinks a pointwise clamp creates.
    const double scale = 1.0 / sup_bound(w);
    phi *= scale;
    jac *= scale;
  }

  double sup_bound(const FieldWitness& w) const {
    Vec per = Vec::Zero(spec->m());
    for (const auto& t : w.terms) per[t.component] += std::abs(t.coef);
    const double b = per.norm();
    return b > 0.0 ? b : 1.0;
  }

  double div_h(const FieldWitness& w, const Point& p) const {
    Vec phi;
    Mat jac;
    field(w, p, phi, jac);
    if (phi.isZero(0.0) && jac.isZero(0.0)) return 0.0;
    const Mat rows = frame(*spec, p);
    double div = 0.0;
    for (int i = 0; i < spec->m(); ++i) div += rows.row(i).dot(jac.row(i));
    return div;
  }
};

std::vector<std::vector<double>> sup_edges(const Box& box, double width, const std::vector<std::vector<double>>& breaks) {
  const int d = box.dim();
  std::vector<std::vector<double>> edges(d);
  for (int k = 0; k < d; ++k) {
    const double lo = box.lo[k];
    const double hi = box.hi[k];
    const double band = width * (hi - lo);
    std::vector<double>& e = edges[k];
    e = {lo, lo + band, hi - band, hi};
    if (k < static_cast<int>(breaks.size())) {
      for (double b : breaks[k]) {
        if (b > lo && b < hi) e.push_back(b);
      }
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }), e.end());
  }
  return edges;
}

}  // namespace

VariationReport var_h_sup(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Box& omega,
                          const SupOptions& opts) {
  const int d = spec.dim();
  if (omega.dim() != d) throw std::invalid_argument("var_h_sup: box dimension mismatch");
  if (!omega.lo.allFinite() || !omega.hi.allFinite()) {
    throw std::invalid_argument("var_h_sup: domain must be bounded");
  }
  if (opts.widths.empty()) throw std::invalid_argument("var_h_sup: no plateau widths");
  const Dictionary dict{&spec, omega, 0.5 * (omega.lo + omega.hi), 0.5 * (omega.hi - omega.lo)};

  auto objective = [&](const FieldWitness& w, int order) {
    const auto edges = sup_edges(omega, w.width, opts.breaks);
    return tensor_gauss_edges(
        edges, order,
        [&](std::span<const double> x) {
          Point p(spec.m(), Vec(Eigen::Map<const Vec>(x.data(), d)));
          const double div = dict.div_h(w, p);
          return div == 0.0 ? 0.0 : u(p) * div;
        });
  };

  const int monos = monomial_count(d);
  FieldWitness best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (double width : opts.widths) {
    for (int i = 0; i < spec.m(); ++i) {
      for (int k = 0; k < monos; ++k) {
        FieldWitness w{{{i, k, 1.0}}, width};
        const double v = objective(w, opts.coarse_order);
        // -phi is in the dictionary too
        if (std::abs(v) > best_value) {
          best_value = std::abs(v);
          w.terms[0].coef = v >= 0.0 ? 1.0 : -1.0;
          best = w;
        }
      }
    }
  }

  const double steps[] = {0.5, -0.5, 0.25, -0.25};
  for (int round = 0; round < opts.ascent_rounds; ++round) {
    bool improved = false;
    for (int i = 0; i < spec.m(); ++i) {
      for (int k = 0; k < monos; ++k) {
        for (double step : steps) {
          FieldWitness w = best;
          auto it = std::find_if(w.terms.begin(), w.terms.end(),
                                 [&](const FieldTerm& t) { return t.component == i && t.monomial == k; });
          if (it == w.terms.end()) {
            w.terms.push_back({i, k, step});
          } else {
            it->coef += step;
          }
          const double v = objective(w, opts.coarse_order);
          if (v > best_value * (1.0 + 1e-12) + 1e-15) {
            best_value = v;
            best = w;
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }

  VariationReport report;
  report.method = VariationMethod::sup_dictionary;
  const double fine = objective(best, opts.fine_order);
  report.value = std::max(0.0, fine);
  report.error = std::abs(fine - best_value);
  report.witness = best;
  report.estimate.value = report.value;
  report.estimate.error = report.error;
  report.estimate.order = opts.fine_order;
  report.estimate.trail = {{opts.coarse_order, best_value}, {opts.fine_order, fine}};
  return report;
}

VariationReport var_h(const GroupSpec& spec, const ScalarField& u, const Box& omega, VariationMethod method,
                      const SupOptions& sup, const QuadratureOptions& quad) {
  if (!omega.lo.allFinite() || !omega.hi.allFinite()) throw std::invalid_argument("var_h: domain must be bounded");
  switch (method) {
    case VariationMethod::smooth_integral:
      return var_h_smooth(spec, u, Region::box(spec, omega), quad);
    case VariationMethod::sup_dictionary:
      return var_h_sup(spec, u.eval, omega, sup);
    case VariationMethod::coarea_slices:
      break;
  }
  throw std::invalid_argument("var_h: the coarea method needs level sets; use coarea_check");
}

LevelSets cylinder_level_sets(const GroupSpec& spec, std::function<double(double)> inverse, Box second) {
  const GroupSpec g = spec;
  return [g, inverse, second](double t) {
    std::vector<LevelPiece> out;
    const double r = inverse(t);
    if (r > 0.0 && std::isfinite(r)) out.push_back({vertical_cylinder(g, r, second), {}});
    return out;
  };
}

LevelSets gauge_level_sets(const GroupSpec& spec, const Point& center, std::function<double(double)> inverse) {
  const GroupSpec g = spec;
  return [g, center, inverse](double t) {
    std::vector<LevelPiece> out;
    const double r = inverse(t);
    if (r > 0.0 && std::isfinite(r)) out.push_back({gauge_sphere(g, center, r), {}});
    return out;
  };
}

LevelSets implicit_level_sets(const GroupSpec& spec, const ScalarField& u, LineFamily family, Window window) {
  const GroupSpec g = spec;
  return [g, u, family, window](double t) {
    ScalarField shifted = u;
    shifted.eval = [u, t](const Point& p) { return u(p) - t; };
    std::vector<LevelPiece> out;
    out.push_back({implicit_patch(g, shifted, family), window});
    return out;
  };
}

CoareaReport coarea_check(const GroupSpec& spec, const ScalarField& u, const Region& omega, const LevelSets& levels,
                          double t_lo, double t_hi, int slices, const QuadratureOptions& opts) {
  if (slices < 1) throw std::invalid_argument("coarea_check: slices must be positive");
  if (!(t_hi > t_lo)) throw std::invalid_argument("coarea_check: need t_lo < t_hi");
  CoareaReport out;
  const VariationReport lhs = var_h_smooth(spec, u, omega, opts);
  out.lhs = lhs.value;
  out.lhs_estimate = lhs.estimate;

  auto level_perimeter = [&](double t) {
    double total = 0.0;
    for (const auto& piece : levels(t)) total += h_perimeter(spec, piece.patch, piece.window, opts).value;
    return total;
  };
  auto midpoint = [&](int count) {
    const double h = (t_hi - t_lo) / count;
    double acc = 0.0;
    for (int k = 0; k < count; ++k) acc += level_perimeter(t_lo + (k + 0.5) * h);
    return acc * h;
  };
  out.rhs_coarse = midpoint(slices);
  const double fine = midpoint(2 * slices);
  out.rhs = (4.0 * fine - out.rhs_coarse) / 3.0;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.gap = scale < 1e-300 ? 0.0 : std::abs(out.lhs - out.rhs) / scale;
  return out;
}

RatioReport poincare_report(const GroupSpec& spec, const ScalarField& u, const Point& center, double r,
                            const QuadratureOptions& opts) {
  const Region ball = Region::gauge_ball(spec, center, r);
  const double q = spec.homogeneous_dimension();
  const double p = q / (q - 1.0);
  const double volume = integrate_region(ball, [](const Point&) { return 1.0; }, opts).value;
  const double mean = integrate_region(ball, [&](const Point& x) { return u(x); }, opts).value / volume;
  RatioReport out;
  out.numerator = std::pow(
      integrate_region(ball, [&](const Point& x) { return std::pow(std::abs(u(x) - mean), p); }, opts).value,
      1.0 / p);
  out.denominator = var_h_smooth(spec, u, ball, opts).value;
  const double scale = std::pow(volume, 1.0 - 1.0 / q);
  if (!(out.denominator > 1e-12 * scale)) {
    out.defined = false;
    out.note = "zero variation: ratio undefined (0/0)";
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = out.numerator / out.denominator;
  return out;
}

RatioReport isoperimetric_report(const GroupSpec& spec, const std::function<bool(const Point&)>& E,
                                 const SurfacePatch& boundary, const Point& center, double r, std::size_t samples,
                                 std::uint64_t seed, const QuadratureOptions& opts) {
  const double q = spec.homogeneous_dimension();
  const BallSpec ball{center, r, BallKind::gauge};
  const double volume =
      integrate_region(Region::gauge_ball(spec, center, r), [](const Point&) { return 1.0; }, opts).value;
  const double frac = ball_fraction(spec, ball, samples, seed, E).value;
  RatioReport out;
  out.numerator = std::pow(std::min(frac, 1.0 - frac) * volume, (q - 1.0) / q);
  out.denominator =
      h_perimeter(spec, boundary, [&](const Point& x) { return in_ball(spec, ball, x); }, opts).value;
  if (!(out.denominator > 0.0)) {
    out.defined = false;
    out.note = "null boundary in the ball: ratio undefined";
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = out.numerator / out.denominator;
  return out;
}

GaussGreenReport gauss_green_residual(const GroupSpec& spec, const Region& volume, const SurfacePatch& boundary,
                                      const HorizontalSection& phi, const std::vector<int>& orders) {
  GaussGreenReport out;
  for (int order : orders) {
    QuadratureOptions opts;
    opts.fixed_order = order;
    const double vol =
        integrate_region(volume, [&](const Point& p) { return h_divergence(spec, phi, p); }, opts).value;
    const double surf = -integrate_box(
                            boundary.params(),
                            [&](std::span<const double> u) {
                              thread_local SurfaceSample s;
                              if (!boundary.sample(u, s)) return 0.0;
                              return frame_pairing(spec, s.point.coords(), s.normal).dot(phi.eval(s.point));
                            },
                            opts)
                            .value;
    out.orders.push_back(order);
    out.volume.push_back(vol);
    out.surface.push_back(surf);
    out.residual.push_back(std::abs(vol + surf));
  }

  // Least-squares slope of log residual against log order, above the round-off floor.
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < out.orders.size(); ++k) {
    const double floor = 1e-13 * std::max({1.0, std::abs(out.volume[k]), std::abs(out.surface[k])});
    if (out.residual[k] > floor) {
      xs.push_back(std::log(static_cast<double>(out.orders[k])));
      ys.push_back(std::log(out.residual[k]));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k];
      sy += ys[k];
      sxx += xs[k] * xs[k];
      sxy += xs[k] * ys[k];
    }
    out.rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    out.rate = std::numeric_limits<double>::infinity();
  }
  return out;
}

HorizontalSection bump_section(const GroupSpec& spec, const Box& support, int component) {
  const int m = spec.m();
  const int d = spec.dim();
  if (support.dim() != d) throw std::invalid_argument("bump_section: support dimension mismatch");
  if (component < 0 || component >= m) throw std::invalid_argument("bump_section: component out of range");
  const Vec center = 0.5 * (support.lo + support.hi);
  const Vec half = 0.5 * (support.hi - support.lo);
  auto factors = [center, half, d](const Point& p, Vec& b, Vec& db) {
    b.resize(d);
    db.resize(d);
    for (int k = 0; k < d; ++k) {
      const double z = (p[k] - center[k]) / half[k];
      if (std::abs(z) >= 1.0) {
        b[k] = 0.0;
        db[k] = 0.0;
        continue;
      }
      const double w = 1.0 - z * z;
      b[k] = std::exp(1.0 - 1.0 / w);
      db[k] = b[k] * (-2.0 * z / (w * w)) / half[k];
    }
  };
  HorizontalSection out;
  out.eval = [factors, m, component](const Point& p) {
    Vec b, db;
    factors(p, b, db);
    Vec v = Vec::Zero(m);
    v[component] = b.prod();
    return v;
  };
  out.jacobian = [factors, m, d, component](const Point& p) {
    Vec b, db;
    factors(p, b, db);
    Mat jac = Mat::Zero(m, d);
    for (int k = 0; k < d; ++k) {
      double others = db[k];
      for (int j = 0; j < d; ++j) {
        if (j != k) others *= b[j];
      }
      jac(component, k) = others;
    }
    return jac;
  };
  out.support = std::make_pair(support.lo, support.hi);
  return out;
}

}  // namespace carnot
