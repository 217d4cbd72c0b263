#include "carnot/metrics.hpp"

#include "carnot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace carnot {

namespace {

constexpr std::size_t kBatch = 65536;

void sample_euclidean_ball(std::mt19937_64& rng, double radius, Eigen::Ref<Vec> out, int& proposals) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double r2 = radius * radius;
  for (;;) {
    ++proposals;
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = radius * unit(rng);
    if (out.squaredNorm() < r2) return;
  }
}

}  // namespace

double norm_d(const GroupSpec& spec, const Point& p) {
  return std::max(p.first().norm(), spec.eps() * std::sqrt(p.second().norm()));
}

double norm_gauge(const Point& p) {
  const double s2 = p.first().squaredNorm();
  return std::pow(s2 * s2 + p.second().squaredNorm(), 0.25);
}

double dist_d(const GroupSpec& spec, const Point& p, const Point& q) {
  return norm_d(spec, multiply(spec, inverse(q), p));
}

double dist_gauge(const GroupSpec& spec, const Point& p, const Point& q) {
  return norm_gauge(multiply(spec, inverse(q), p));
}

double distance(const GroupSpec& spec, BallKind kind, const Point& p, const Point& q) {
  return kind == BallKind::box_d ? dist_d(spec, p, q) : dist_gauge(spec, p, q);
}

bool in_ball(const GroupSpec& spec, const BallSpec& ball, const Point& q) {
  return distance(spec, ball.kind, q, ball.center) < ball.radius;
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double box_ball_volume(const GroupSpec& spec, double r) {
  const double second = r * r / (spec.eps() * spec.eps());
  return unit_ball_volume(spec.m()) * std::pow(r, spec.m()) * unit_ball_volume(spec.n()) *
         std::pow(second, spec.n());
}

BallSampler::BallSampler(const GroupSpec& spec, double radius, BallKind kind)
    : spec_(&spec), radius_(radius), kind_(kind) {
  if (!(radius > 0.0)) throw std::invalid_argument("BallSampler: radius must be positive");
}

int BallSampler::sample(std::mt19937_64& rng, Point& out) const {
  const int m = spec_->m();
  const int n = spec_->n();
  if (out.dim() != spec_->dim()) out = Point(m, n);
  int proposals = 0;
  if (kind_ == BallKind::box_d) {
    sample_euclidean_ball(rng, radius_, out.coords().head(m), proposals);
    const double second = radius_ * radius_ / (spec_->eps() * spec_->eps());
    sample_euclidean_ball(rng, second, out.coords().tail(n), proposals);
    return proposals;
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double r2 = radius_ * radius_;
  for (;;) {
    ++proposals;
    for (int k = 0; k < m; ++k) out[k] = radius_ * unit(rng);
    for (int k = 0; k < n; ++k) out[m + k] = r2 * unit(rng);
    if (norm_gauge(out) < radius_) return proposals;
  }
}

double BallSampler::proposal_volume() const {
  const int m = spec_->m();
  const int n = spec_->n();
  if (kind_ == BallKind::box_d) return box_ball_volume(*spec_, radius_);
  return std::pow(2.0 * radius_, m) * std::pow(2.0 * radius_ * radius_, n);
}

MeasureEstimate ball_fraction(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                              std::uint64_t seed, const std::function<bool(const Point&)>& pred) {
  const BallSampler sampler(spec, ball.radius, ball.kind);
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::size_t> hits(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    const std::size_t count = std::min(kBatch, samples - b * kBatch);
    Point local(spec.m(), spec.n());
    std::size_t h = 0;
    for (std::size_t k = 0; k < count; ++k) {
      sampler.sample(rng, local);
      if (pred(multiply(spec, ball.center, local))) ++h;
    }
    hits[b] = h;
  });

  MeasureEstimate est;
  std::size_t total_hits = 0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    total_hits += hits[b];
    total += std::min(kBatch, samples - b * kBatch);
    est.trail.emplace_back(static_cast<double>(total), static_cast<double>(total_hits) / total);
  }
  const double p = total ? static_cast<double>(total_hits) / total : 0.0;
  est.value = p;
  est.error = total ? std::sqrt(p * (1.0 - p) / total) : 0.0;
  est.samples = total;
  return est;
}

MeasureEstimate ball_volume(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                            std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("ball_volume: need at least 1000 samples");
  if (!(ball.radius > 0.0)) throw std::invalid_argument("ball_volume: radius must be positive");
  if (ball.kind == BallKind::box_d) {
    MeasureEstimate est;
    est.value = box_ball_volume(spec, ball.radius);
    est.trail.emplace_back(0.0, est.value);
    return est;
  }

  // Acceptance fraction of the bounding box.
  const int m = spec.m();
  const int n = spec.n();
  const double r = ball.radius;
  const double box = std::pow(2.0 * r, m) * std::pow(2.0 * r * r, n);
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::size_t> hits(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t count = std::min(kBatch, samples - b * kBatch);
    Point q(m, n);
    std::size_t h = 0;
    for (std::size_t k = 0; k < count; ++k) {
      for (int i = 0; i < m; ++i) q[i] = r * unit(rng);
      for (int l = 0; l < n; ++l) q[m + l] = r * r * unit(rng);
      if (norm_gauge(q) < r) ++h;
    }
    hits[b] = h;
  });
  MeasureEstimate est;
  std::size_t total_hits = 0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    total_hits += hits[b];
    total += std::min(kBatch, samples - b * kBatch);
    est.trail.emplace_back(static_cast<double>(total), box * total_hits / static_cast<double>(total));
  }
  const double p = static_cast<double>(total_hits) / total;
  est.value = box * p;
  est.error = box * std::sqrt(p * (1.0 - p) / total);
  est.samples = total;
  return est;
}

double ball_diameter_estimate(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                              std::uint64_t seed) {
  const BallSampler sampler(spec, ball.radius, ball.kind);
  std::mt19937_64 rng(seed);
  std::vector<Point> pts(samples, Point(spec.m(), spec.n()));
  for (auto& p : pts) {
    sampler.sample(rng, p);
    p = multiply(spec, ball.center, p);
  }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const Point inv = inverse(pts[a]);
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const Point diff = multiply(spec, inv, pts[b]);
      const double d = ball.kind == BallKind::box_d ? norm_d(spec, diff) : norm_gauge(diff);
      best = std::max(best, d);
    }
  }
  return best;
}

EquivalenceConstants d_gauge_equivalence(const GroupSpec& spec, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  EquivalenceConstants out{std::numeric_limits<double>::infinity(), 0.0};
  Point p(spec.m(), spec.n());
  for (std::size_t k = 0; k < samples; ++k) {
    for (int i = 0; i < spec.dim(); ++i) p[i] = gauss(rng);
    const double rho = norm_gauge(p);
    if (rho == 0.0) continue;
    const double ratio = norm_d(spec, dilate(spec, 1.0 / rho, p));
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

double triangle_violation(const GroupSpec& spec, BallKind kind, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Point x(spec.m(), spec.n()), y(spec.m(), spec.n()), z(spec.m(), spec.n());
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    for (int i = 0; i < spec.dim(); ++i) {
      x[i] = unit(rng);
      y[i] = unit(rng);
      z[i] = unit(rng);
    }
    const double excess = distance(spec, kind, x, z) - distance(spec, kind, x, y) - distance(spec, kind, y, z);
    worst = std::max(worst, excess);
  }
  return worst;
}

}  // namespace carnot
