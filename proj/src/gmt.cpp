#include "carnot/gmt.hpp"

#include "carnot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carnot {

namespace {

constexpr std::size_t kBatch = 65536;

void check_radii(const std::vector<double>& radii, const char* who) {
  if (radii.empty()) throw std::invalid_argument(std::string(who) + ": no radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw std::invalid_argument(std::string(who) + ": radii must be positive");
    if (k > 0 && !(radii[k] < radii[k - 1])) {
      throw std::invalid_argument(std::string(who) + ": radii must be strictly decreasing");
    }
  }
}

std::vector<double> radii_or_default(const std::vector<double>& radii) {
  return radii.empty() ? default_radii() : radii;
}

// Uniform samples of the ball mapped through f, in batch order.
std::vector<double> ball_values(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                                std::uint64_t seed, const std::function<double(const Point&)>& f) {
  const BallSampler sampler(spec, ball.radius, ball.kind);
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<double> out(samples);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    const std::size_t begin = b * kBatch;
    const std::size_t end = std::min(samples, begin + kBatch);
    Point local(spec.m(), spec.n());
    for (std::size_t k = begin; k < end; ++k) {
      sampler.sample(rng, local);
      out[k] = f(multiply(spec, ball.center, local));
    }
  });
  return out;
}

// Mean of g over the samples where keep holds.
MeasureEstimate conditional_mean(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                                 std::uint64_t seed, const Predicate& keep,
                                 const std::function<double(const Point&)>& g) {
  const BallSampler sampler(spec, ball.radius, ball.kind);
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<double> sum(batches, 0.0), sumsq(batches, 0.0);
  std::vector<std::size_t> count(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    const std::size_t n = std::min(kBatch, samples - b * kBatch);
    Point local(spec.m(), spec.n());
    for (std::size_t k = 0; k < n; ++k) {
      sampler.sample(rng, local);
      const Point q = multiply(spec, ball.center, local);
      if (!keep(q)) continue;
      const double v = g(q);
      sum[b] += v;
      sumsq[b] += v * v;
      ++count[b];
    }
  });
  MeasureEstimate est;
  double s = 0.0, s2 = 0.0;
  std::size_t c = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    s += sum[b];
    s2 += sumsq[b];
    c += count[b];
  }
  est.samples = c;
  if (c == 0) return est;
  est.value = s / c;
  const double var = std::max(0.0, s2 / c - est.value * est.value);
  est.error = std::sqrt(var / c);
  est.trail.emplace_back(static_cast<double>(c), est.value);
  return est;
}

}  // namespace

std::vector<double> default_radii(double r0, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::ldexp(r0, -k));
  return out;
}

DensityProfile density(const GroupSpec& spec, const Predicate& E, const Point& x, const DensityOptions& opts) {
  if (opts.samples < 1000) throw std::invalid_argument("density: need at least 1000 samples");
  DensityProfile out;
  out.point = x;
  out.radii = radii_or_default(opts.radii);
  check_radii(out.radii, "density");
  for (std::size_t k = 0; k < out.radii.size(); ++k) {
    const BallSpec ball{x, out.radii[k], opts.kind};
    out.values.push_back(ball_fraction(spec, ball, opts.samples, derive_seed(opts.seed, k), E));
  }
  out.extrapolated = out.values.back().value;
  return out;
}

bool density_vanishes(const std::vector<double>& values) {
  if (values.empty()) return false;
  if (!(values.back() < 0.01)) return false;
  const std::size_t n = values.size();
  for (std::size_t k = (n >= 3 ? n - 2 : 1); k < n; ++k) {
    if (values[k] > values[k - 1]) return false;
  }
  return true;
}

bool density_vanishes(const DensityProfile& profile) {
  std::vector<double> v;
  for (const auto& e : profile.values) v.push_back(e.value);
  return density_vanishes(v);
}

AveragedNormal averaged_normal(const GroupSpec& spec, const Domain& dom, const PatchFactory& patches,
                               const Point& x, const std::vector<double>& radii, const QuadratureOptions& opts) {
  check_radii(radii, "averaged_normal");
  horizontal_normal(spec, dom, x);
  AveragedNormal out;
  out.radii = radii;
  const int m = spec.m();
  for (double r : radii) {
    const SurfacePatch patch = patches(r);
    const BallSpec ball{x, r, BallKind::box_d};
    const Window window = [&](const Point& q) { return in_ball(spec, ball, q); };
    const double total = h_perimeter(spec, patch, window, opts).value;
    Vec avg(m);
    for (int i = 0; i < m; ++i) {
      avg[i] = integrate_box(
                   patch.params(),
                   [&](std::span<const double> u) {
                     thread_local SurfaceSample s;
                     if (!patch.sample(u, s) || !window(s.point)) return 0.0;
                     return frame_pairing(spec, s.point.coords(), s.normal)[i];
                   },
                   opts)
                   .value;
    }
    out.values.push_back(total > 0.0 ? avg.norm() / total : 0.0);
  }
  for (std::size_t k = 1; k < out.values.size(); ++k) {
    if (out.values[k] < out.values[k - 1] - 1e-12) out.monotone = false;
  }
  return out;
}

ApproxLimits approx_limits(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Point& x,
                           const LimitOptions& opts) {
  const DensityOptions& dopts = opts.density;
  if (dopts.samples < 1000) throw std::invalid_argument("approx_limits: need at least 1000 samples");
  const std::vector<double> radii = radii_or_default(dopts.radii);
  check_radii(radii, "approx_limits");

  std::vector<std::vector<double>> values;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    values.push_back(ball_values(spec, BallSpec{x, radii[k], dopts.kind}, dopts.samples,
                                 derive_seed(dopts.seed, k), u));
    auto& v = values.back();
    std::sort(v.begin(), v.end());
    lo = std::min(lo, v.front());
    hi = std::max(hi, v.back());
  }

  std::vector<double> grid = opts.t_grid;
  if (grid.empty()) {
    if (hi > lo) {
      const int steps = 1000;
      for (int j = 0; j <= steps; ++j) grid.push_back(j == steps ? hi : lo + (hi - lo) * j / steps);
    } else {
      const double pad = 1e-3 * std::max(1.0, std::abs(lo));
      grid = {lo - pad, lo, lo + pad};
    }
  }

  const std::size_t nr = radii.size();
  auto above = [&](double t) {
    std::vector<double> d(nr);
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& v = values[k];
      d[k] = static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), t)) / v.size();
    }
    return density_vanishes(d);
  };
  auto below = [&](double t) {
    std::vector<double> d(nr);
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& v = values[k];
      d[k] = static_cast<double>(std::lower_bound(v.begin(), v.end(), t) - v.begin()) / v.size();
    }
    return density_vanishes(d);
  };

  ApproxLimits out;
  const std::size_t g = grid.size();
  std::vector<char> va(g), vb(g);
  for (std::size_t j = 0; j < g; ++j) {
    va[j] = above(grid[j]);
    vb[j] = below(grid[j]);
  }

  // {u > t} vanishes for large t: pattern false..false true..true.
  std::ptrdiff_t last_false_a = -1, first_true_a = -1;
  for (std::size_t j = 0; j < g; ++j) {
    if (va[j] && first_true_a < 0) first_true_a = static_cast<std::ptrdiff_t>(j);
    if (!va[j]) last_false_a = static_cast<std::ptrdiff_t>(j);
  }
  if (last_false_a + 1 < static_cast<std::ptrdiff_t>(g)) out.mu = grid[last_false_a + 1];
  if (first_true_a >= 0 && first_true_a < last_false_a) {
    out.resolved = false;
    out.mu_interval = {grid[first_true_a], grid[last_false_a]};
  } else {
    out.mu_interval = {out.mu, out.mu};
  }

  // {u < t} vanishes for small t: pattern true..true false..false.
  std::ptrdiff_t first_false_b = -1, last_true_b = -1;
  for (std::size_t j = 0; j < g; ++j) {
    if (!vb[j] && first_false_b < 0) first_false_b = static_cast<std::ptrdiff_t>(j);
    if (vb[j]) last_true_b = static_cast<std::ptrdiff_t>(j);
  }
  const std::ptrdiff_t stop = first_false_b < 0 ? static_cast<std::ptrdiff_t>(g) : first_false_b;
  if (stop > 0) out.lambda = grid[stop - 1];
  if (first_false_b >= 0 && last_true_b > first_false_b) {
    out.resolved = false;
    out.lambda_interval = {grid[first_false_b], grid[last_true_b]};
  } else {
    out.lambda_interval = {out.lambda, out.lambda};
  }

  if (std::isfinite(out.mu) && std::isfinite(out.lambda)) {
    out.U = 0.5 * (out.mu + out.lambda);
    const double range = std::max(hi - lo, 1e-300);
    out.is_jump = out.mu - out.lambda > opts.jump_tol * range;
  } else {
    out.U = std::numeric_limits<double>::quiet_NaN();
    out.is_jump = true;
  }
  return out;
}

TraceResult trace_at(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Domain& dom,
                     const Point& x, const LimitOptions& opts, double zero_tol) {
  const double value = dom.phi(x);
  if (!(std::abs(value) < 1e-6)) {
    throw std::invalid_argument("trace_at: point is not on the boundary (|phi| = " + std::to_string(std::abs(value)) +
                                ")");
  }
  const auto extended = [&](const Point& p) { return dom.contains(p) ? u(p) : 0.0; };
  TraceResult out;
  out.limits = approx_limits(spec, extended, x, opts);
  out.value = out.limits.mu + out.limits.lambda;
  const double scale = std::max({1.0, std::abs(out.limits.mu), std::abs(out.limits.lambda)});
  const bool mu_zero = std::abs(out.limits.mu) <= zero_tol * scale;
  const bool lambda_zero = std::abs(out.limits.lambda) <= zero_tol * scale;
  if (!std::isfinite(out.value)) {
    out.flagged = true;
    out.message = "approximate limits not finite";
  } else if (!mu_zero && !lambda_zero) {
    out.flagged = true;
    out.message = "neither approximate limit vanishes; point may be off the measure-theoretic boundary";
  } else if (!out.limits.resolved) {
    out.flagged = true;
    out.message = "density pattern along the threshold grid is not monotone";
  }
  return out;
}

BlowupProfile blowup_profile(const GroupSpec& spec, const Domain& dom, const Point& p, const BlowupOptions& opts) {
  const DensityOptions& dopts = opts.density;
  if (dopts.samples < 1000) throw std::invalid_argument("blowup_profile: need at least 1000 samples");
  BlowupProfile out;
  out.normal = horizontal_normal(spec, dom, p).components;
  out.radii = radii_or_default(dopts.radii);
  check_radii(out.radii, "blowup_profile");
  const HalfSpaceH hs{p, out.normal};
  const double q1 = spec.homogeneous_dimension() - 1;
  const double exponent = spec.homogeneous_dimension() / q1;

  if (opts.u) {
    LimitOptions lopts;
    lopts.density = dopts;
    lopts.density.kind = opts.mean_kind;
    out.limits = approx_limits(spec, opts.u, p, lopts);
  }

  for (std::size_t k = 0; k < out.radii.size(); ++k) {
    const double r = out.radii[k];
    const BallSpec ball{p, r, dopts.kind};
    out.inside_minus.push_back(ball_fraction(spec, ball, dopts.samples, derive_seed(dopts.seed, 2 * k),
                                             [&](const Point& q) {
                                               return dom.contains(q) && halfspace_side(spec, hs, q) == Side::minus;
                                             }));
    out.outside_plus.push_back(ball_fraction(spec, ball, dopts.samples, derive_seed(dopts.seed, 2 * k + 1),
                                             [&](const Point& q) {
                                               return !dom.contains(q) && halfspace_side(spec, hs, q) != Side::minus;
                                             }));
    if (opts.patches) {
      const Window window = [&](const Point& q) { return in_ball(spec, ball, q); };
      MeasureEstimate per = h_perimeter(spec, opts.patches(r), window, opts.quadrature);
      const double scale = std::pow(r, q1);
      per.value /= scale;
      per.error /= scale;
      out.perimeter_ratio.push_back(per);
    }
    if (opts.u) {
      const BallSpec mball{p, r, opts.mean_kind};
      const double mu = out.limits.mu;
      const double lambda = out.limits.lambda;
      out.mean_minus.push_back(conditional_mean(
          spec, mball, dopts.samples, derive_seed(dopts.seed, 1000 + 2 * k),
          [&](const Point& q) { return halfspace_side(spec, hs, q) != Side::plus; },
          [&](const Point& q) { return std::pow(std::abs(opts.u(q) - mu), exponent); }));
      out.mean_plus.push_back(conditional_mean(
          spec, mball, dopts.samples, derive_seed(dopts.seed, 1001 + 2 * k),
          [&](const Point& q) { return halfspace_side(spec, hs, q) != Side::minus; },
          [&](const Point& q) { return std::pow(std::abs(opts.u(q) - lambda), exponent); }));
    }
  }
  return out;
}

}  // namespace carnot
