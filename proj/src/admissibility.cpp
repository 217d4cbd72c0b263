#include "carnot/admissibility.hpp"

#include "carnot/parallel.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace carnot {

namespace {

MeasureEstimate sum_pieces(const GroupSpec& spec, const std::vector<BoundaryPiece>& pieces,
                           const QuadratureOptions& opts) {
  MeasureEstimate total;
  for (const auto& piece : pieces) {
    const MeasureEstimate e = h_perimeter(spec, piece.patch, piece.window, opts);
    total.value += e.value;
    total.error += e.error;
    total.order = std::max(total.order, e.order);
    total.converged = total.converged && e.converged;
  }
  return total;
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

void check_deficit(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("counterexample: deficit must lie in [0, 1)");
}

}  // namespace

AdmissibilityRatio admissibility_ratio(const GroupSpec& spec, const std::vector<BoundaryPiece>& on_boundary,
                                       const std::vector<BoundaryPiece>& interior, const QuadratureOptions& opts) {
  AdmissibilityRatio out;
  out.numerator = sum_pieces(spec, on_boundary, opts);
  out.denominator = sum_pieces(spec, interior, opts);
  if (on_boundary.empty()) {
    out.ratio = 0.0;
    return out;
  }
  if (!(out.denominator.value > 0.0)) {
    out.ratio = std::numeric_limits<double>::infinity();
    out.infinite = true;
    return out;
  }
  out.ratio = out.numerator.value / out.denominator.value;
  return out;
}

double counterexample_F(double deficit, double x) {
  check_deficit(deficit);
  if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("counterexample_F: x must lie in (0, 1]");
  const double e = deficit;
  const double a = (2.0 - e) * (2.0 - e) * std::pow(x, -2.0 * e / (2.0 - e));
  // u = v^4 smooths the fractional powers at the origin.
  QuadratureOptions opts;
  opts.min_order = 16;
  opts.rel_tol = 1e-14;
  return integrate_1d(0.0, 1.0,
                      [&](double v) {
                        const double v3 = v * v * v;
                        const double u = v3 * v;
                        return 4.0 * v3 * std::pow(u, 2.0 - e) * std::sqrt(a + 0.25 * std::pow(u, 2.0 * e));
                      },
                      opts)
      .value;
}

CounterexampleSweep counterexample_sweep(const std::vector<double>& deficits, const std::vector<double>& Ns,
                                         const QuadratureOptions& opts) {
  for (double e : deficits) check_deficit(e);
  for (double N : Ns) {
    if (!(N >= 1.0)) throw std::invalid_argument("counterexample_sweep: N must be >= 1");
  }
  const GroupSpec h1 = GroupSpec::heisenberg(1);
  CounterexampleSweep out;
  out.deficits = deficits;
  out.rows.resize(deficits.size() * Ns.size());
  parallel_for(out.rows.size(), [&](std::size_t k) {
    const double e = deficits[k / Ns.size()];
    const double N = Ns[k % Ns.size()];
    const double x = 1.0 / N;
    const double radius = std::pow(x, 1.0 / (2.0 - e));
    CounterexampleRow& row = out.rows[k];
    row.deficit = e;
    row.N = N;
    row.perim_top = h_perimeter(h1, horizontal_disk(h1, 1.0 - x, radius), {}, opts);
    const SurfacePatch side = radial_graph(
        h1, [e](double r) { return 1.0 - std::pow(r, 2.0 - e); },
        [e](double r) { return -(2.0 - e) * std::pow(r, 1.0 - e); }, 0.0, radius, 4);
    row.perim_side = h_perimeter(h1, side, {}, opts);
    row.ratio = row.perim_side.value / row.perim_top.value;
    row.F = counterexample_F(e, x);
    row.closed_form = std::numbers::pi / 3.0 * std::pow(x, 3.0 / (2.0 - e));
    row.rel_err = std::abs(row.perim_top.value - row.closed_form) / row.closed_form;
  });
  for (std::size_t i = 0; i < deficits.size(); ++i) {
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < Ns.size(); ++j) {
      const auto& row = out.rows[i * Ns.size() + j];
      lx.push_back(std::log(row.N));
      ly.push_back(std::log(row.F));
    }
    out.slopes.push_back(Ns.size() >= 2 ? ls_slope(lx, ly) : 0.0);
    const auto last = std::max_element(Ns.begin(), Ns.end()) - Ns.begin();
    const auto& row = out.rows[i * Ns.size() + static_cast<std::size_t>(last)];
    const double e = deficits[i];
    out.prefactors.push_back(Ns.empty() ? 0.0 : row.F * std::pow(row.N, -e / (2.0 - e)));
  }
  return out;
}

SymmetryBound partial_symmetry_bound(const GroupSpec& spec, const GraphProfile& profile, const ProbeRegion& probes) {
  if (!profile.dg_ds) throw std::invalid_argument("partial_symmetry_bound: profile needs dg/ds");
  if (!(probes.s_lo > 0.0 && probes.s_hi > probes.s_lo) || probes.s_count < 2) {
    throw std::invalid_argument("partial_symmetry_bound: need 0 < s_lo < s_hi and s_count >= 2");
  }
  const int ny = spec.n() - 1;
  if (ny > 0 && probes.y_box.dim() != ny) {
    throw std::invalid_argument("partial_symmetry_bound: y box must have n - 1 axes");
  }
  SymmetryBound out;
  if (!is_heisenberg_type(spec).is_htype) out.warning = "group is not of Heisenberg type; the bound is not guaranteed";

  // y probes: a tensor grid of the box (the single empty vector when n = 1).
  std::vector<Vec> ys;
  if (ny == 0) {
    ys.emplace_back(0);
  } else {
    const int c = std::max(probes.y_count, 1);
    std::vector<int> idx(ny, 0);
    while (true) {
      Vec y(ny);
      for (int l = 0; l < ny; ++l) {
        const double f = c == 1 ? 0.5 : static_cast<double>(idx[l]) / (c - 1);
        y[l] = probes.y_box.lo[l] + f * (probes.y_box.hi[l] - probes.y_box.lo[l]);
      }
      ys.push_back(y);
      int l = 0;
      while (l < ny && ++idx[l] == c) idx[l++] = 0;
      if (l == ny) break;
    }
  }

  std::vector<double> ss, qs;
  for (int k = 0; k < probes.s_count; ++k) {
    const double s = probes.s_lo * std::pow(probes.s_hi / probes.s_lo, static_cast<double>(k) / (probes.s_count - 1));
    double q = 0.0;
    for (const Vec& y : ys) {
      q = std::max(q, std::abs(profile.dg_ds(s, y)) / s);
      double l = 1.0;
      if (ny > 0 && profile.dg_dy) l += profile.dg_dy(s, y).squaredNorm();
      out.L = std::max(out.L, l);
    }
    ss.push_back(s);
    qs.push_back(q);
  }
  out.sup_quotient = *std::max_element(qs.begin(), qs.end());

  // Divergence test on the half of the probes closest to s = 0.
  const std::size_t half = std::max<std::size_t>(2, ss.size() / 2);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < half; ++k) {
    if (qs[k] > 0.0) {
      lx.push_back(std::log(ss[k]));
      ly.push_back(std::log(qs[k]));
    }
  }
  out.quotient_slope = lx.size() >= 2 ? ls_slope(lx, ly) : 0.0;
  if (out.quotient_slope < -0.01) {
    out.M = std::numeric_limits<double>::infinity();
    out.bound = out.M;
    out.tight_bound = out.M;
    out.satisfied = false;
    out.verdict = "partial symmetry failed: |dg/ds|/s diverges as s -> 0";
    return out;
  }
  out.M = out.sup_quotient;
  out.bound = std::sqrt(out.M * out.M + 0.25 * out.L);
  out.tight_bound = 2.0 * out.bound;
  out.verdict = "partial symmetry satisfied";
  return out;
}

GraphProfile profile_from_domain(const GroupSpec& spec, const Domain& dom, const Point& P, double reach,
                                 int directions) {
  if (!(reach > 0.0)) throw std::invalid_argument("profile_from_domain: reach must be positive");
  if (directions < 1) throw std::invalid_argument("profile_from_domain: need at least one direction");
  const int m = spec.m();
  const int n = spec.n();
  std::vector<Vec> dirs;
  if (m == 2) {
    for (int k = 0; k < directions; ++k) {
      const double a = 2.0 * std::numbers::pi * k / directions;
      dirs.push_back(Vec::Unit(2, 0) * std::cos(a) + Vec::Unit(2, 1) * std::sin(a));
    }
  } else {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < directions; ++k) {
      Vec w(m);
      for (int i = 0; i < m; ++i) w[i] = gauss(rng);
      dirs.push_back(w.normalized());
    }
  }

  // g(xi, y') = -t_n with phi(P . (xi, y', t_n)) = 0.
  auto g = [spec, dom, P, reach, m, n](const Vec& xi, const Vec& y) {
    Point q(m, n);
    q.coords().head(m) = xi;
    for (int l = 0; l < n - 1; ++l) q[m + l] = y[l];
    auto f = [&](double tn) {
      q[m + n - 1] = tn;
      return dom.phi(multiply(spec, P, q));
    };
    const double fa = f(-reach);
    const double fb = f(reach);
    if ((fa < 0.0) == (fb < 0.0)) {
      throw std::invalid_argument("profile_from_domain: no boundary crossing within reach");
    }
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(f, -reach, reach, fa, fb,
                                                           boost::math::tools::eps_tolerance<double>(52), iters);
    return -0.5 * (bracket.first + bracket.second);
  };

  GraphProfile out;
  // Central differences at h and h/2 with one Richardson step; h relative to s
  // keeps the root's round-off small next to h.
  out.dg_ds = [g, dirs](double s, const Vec& y) {
    const double h = 0.1 * s;
    double best = 0.0;
    for (const Vec& w : dirs) {
      const double d1 = (g((s + h) * w, y) - g((s - h) * w, y)) / (2.0 * h);
      const double d2 = (g((s + 0.5 * h) * w, y) - g((s - 0.5 * h) * w, y)) / h;
      const double d = (4.0 * d2 - d1) / 3.0;
      if (std::abs(d) > std::abs(best)) best = d;
    }
    return best;
  };
  out.dg_dy = [g, dirs, n](double s, const Vec& y) {
    Vec grad = Vec::Zero(n - 1);
    for (const Vec& w : dirs) {
      Vec yy = y;
      Vec here(n - 1);
      for (int l = 0; l < n - 1; ++l) {
        const double h = 1e-5 * (1.0 + std::abs(y[l]));
        yy[l] = y[l] + h;
        const double gp = g(s * w, yy);
        yy[l] = y[l] - h;
        const double gm = g(s * w, yy);
        yy[l] = y[l];
        here[l] = (gp - gm) / (2.0 * h);
      }
      if (here.squaredNorm() > grad.squaredNorm()) grad = here;
    }
    return grad;
  };
  return out;
}

NoncharacteristicBound noncharacteristic_bound(const GroupSpec& spec, const Domain& dom, const SurfacePatch& patch,
                                               int resolution, int rotations, std::uint64_t seed) {
  if (resolution < 1 || rotations < 1) {
    throw std::invalid_argument("noncharacteristic_bound: resolution and rotations must be positive");
  }
  const int m = spec.m();
  const Box& box = patch.params();
  const int k = box.dim();
  const Vec du = (box.hi - box.lo) / resolution;

  std::vector<Point> points;
  std::vector<Vec> normals;
  std::vector<int> idx(k, 0);
  SurfaceSample sample;
  Vec u(k);
  while (true) {
    for (int j = 0; j < k; ++j) u[j] = box.lo[j] + (idx[j] + 0.5) * du[j];
    if (patch.sample(std::span<const double>(u.data(), k), sample)) {
      points.push_back(sample.point);
      normals.push_back(horizontal_normal(spec, dom, sample.point).components);
    }
    int j = 0;
    while (j < k && ++idx[j] == resolution) idx[j++] = 0;
    if (j == k) break;
  }
  if (points.empty()) throw std::invalid_argument("noncharacteristic_bound: patch has no samples");

  std::vector<Mat> frames;
  if (m == 2) {
    // max_i |(R nu)_i| is invariant under quarter turns.
    for (int r = 0; r < rotations; ++r) {
      const double a = 0.5 * std::numbers::pi * r / rotations;
      Mat R(2, 2);
      R << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
      frames.push_back(R);
    }
  } else {
    frames.push_back(Mat::Identity(m, m));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int r = 1; r < rotations; ++r) {
      Mat A(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) A(i, j) = gauss(rng);
      }
      frames.push_back(Eigen::HouseholderQR<Mat>(A).householderQ() * Mat::Identity(m, m));
    }
  }

  NoncharacteristicBound out;
  out.K = -1.0;
  for (const Mat& R : frames) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t p = 0; p < normals.size(); ++p) {
      const double v = (R * normals[p]).cwiseAbs().maxCoeff();
      if (v < worst) {
        worst = v;
        at = p;
      }
    }
    if (worst > out.K) {
      out.K = worst;
      out.argmin = points[at];
      out.rotation = R;
    }
  }
  out.ratio_bound = 1.0 / out.K;
  return out;
}

}  // namespace carnot
