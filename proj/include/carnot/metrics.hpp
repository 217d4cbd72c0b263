#pragma once

#include "carnot/group.hpp"
#include "carnot/measure.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace carnot {

enum class BallKind { box_d, gauge };

struct BallSpec {
  Point center;
  double radius = 1.0;
  BallKind kind = BallKind::box_d;
};

/// d(p, 0) = max(|p_first|, eps |p_second|^{1/2}).
double norm_d(const GroupSpec& spec, const Point& p);
/// rho(p, 0) = (|p_first|^4 + |p_second|^2)^{1/4}.
double norm_gauge(const Point& p);

/// d(p, q) = d(q^{-1}.p, 0)
double dist_d(const GroupSpec& spec, const Point& p, const Point& q);
double dist_gauge(const GroupSpec& spec, const Point& p, const Point& q);
double distance(const GroupSpec& spec, BallKind kind, const Point& p, const Point& q);

bool in_ball(const GroupSpec& spec, const BallSpec& ball, const Point& q);

/// Volume of the Euclidean unit ball in R^k.
double unit_ball_volume(int k);

/// Closed form |B(x, r)| for the box distance: omega_m r^m * omega_n (r^2/eps^2)^n.
double box_ball_volume(const GroupSpec& spec, double r);

/// Uniform samples from B(0, r) by rejection from the bounding cylinder (box-d)
/// or the bounding Euclidean box (gauge).
class BallSampler {
 public:
  BallSampler(const GroupSpec& spec, double radius, BallKind kind);

  /// Writes one uniform point of B(0, r) into `out`; returns the number of
  /// proposals used.
  int sample(std::mt19937_64& rng, Point& out) const;

  /// Volume of the proposal region.
  double proposal_volume() const;

 private:
  const GroupSpec* spec_;
  double radius_;
  BallKind kind_;
};

/// Monte Carlo fraction of B(x, r) satisfying `pred`, sampled in fixed
/// 65536-point batches with per-batch derived seeds so that the result does not
/// depend on the thread count.
MeasureEstimate ball_fraction(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                              std::uint64_t seed, const std::function<bool(const Point&)>& pred);

/// Lebesgue measure of a ball. The box-d path is closed form; the gauge path is
/// Monte Carlo. Throws std::invalid_argument when samples < 1000.
MeasureEstimate ball_volume(const GroupSpec& spec, const BallSpec& ball, std::size_t samples = 1000000,
                            std::uint64_t seed = 1);

/// sup d(p, q) over sampled pairs of the ball (pairwise over `samples` points).
double ball_diameter_estimate(const GroupSpec& spec, const BallSpec& ball, std::size_t samples,
                              std::uint64_t seed);

struct EquivalenceConstants {
  double min_ratio = 0.0;  ///< min d/rho
  double max_ratio = 0.0;  ///< max d/rho
};

/// Range of d/rho over random points of the unit gauge sphere.
EquivalenceConstants d_gauge_equivalence(const GroupSpec& spec, std::size_t samples, std::uint64_t seed);

/// Largest d(x,z) - d(x,y) - d(y,z) over random triples in [-1,1]^{m+n}.
double triangle_violation(const GroupSpec& spec, BallKind kind, std::size_t samples, std::uint64_t seed);

}  // namespace carnot
