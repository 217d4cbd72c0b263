#include <doctest.h>

#include "carnot/metrics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace carnot;

namespace {

Point random_point(const GroupSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Point p(spec.m(), spec.n());
  for (int k = 0; k < spec.dim(); ++k) p[k] = u(rng);
  return p;
}

}  // namespace

TEST_CASE("box distance and gauge by hand") {
  const GroupSpec h = GroupSpec::heisenberg(1, 0.5);
  CHECK(norm_d(h, Point(h, {3, 4, 0})) == 5.0);
  CHECK(norm_d(h, Point(h, {0, 0, 4})) == 1.0);
  CHECK(norm_gauge(Point(h, {1, 0, 0})) == 1.0);
  CHECK(norm_gauge(Point(h, {0, 0, 1})) == 1.0);
  CHECK(dist_d(h, Point(h, {0.2, 0.1, 0.3}), Point(h, {0.2, 0.1, 0.3})) == 0.0);
}

TEST_CASE("homogeneity and left invariance") {
  std::mt19937_64 rng(1);
  for (const auto& spec : {GroupSpec::heisenberg(1), GroupSpec::quaternionic(), GroupSpec::free_step2(3)}) {
    for (int k = 0; k < 500; ++k) {
      const Point p = random_point(spec, rng), q = random_point(spec, rng), z = random_point(spec, rng);
      for (double r : {0.5, 2.0}) {
        const Point rp = dilate(spec, r, p), rq = dilate(spec, r, q);
        CHECK(std::abs(dist_d(spec, rp, rq) - r * dist_d(spec, p, q)) < 1e-12 * (1 + dist_d(spec, p, q)));
        CHECK(std::abs(dist_gauge(spec, rp, rq) - r * dist_gauge(spec, p, q)) < 1e-12 * (1 + dist_gauge(spec, p, q)));
      }
      const Point zp = multiply(spec, z, p), zq = multiply(spec, z, q);
      CHECK(std::abs(dist_d(spec, zp, zq) - dist_d(spec, p, q)) < 1e-12 * (1 + dist_d(spec, p, q)));
      CHECK(std::abs(dist_gauge(spec, zp, zq) - dist_gauge(spec, p, q)) < 1e-12 * (1 + dist_gauge(spec, p, q)));
    }
  }
}

TEST_CASE("box ball volume closed form and scaling") {
  const GroupSpec h = GroupSpec::heisenberg(1, 0.5);
  const auto v1 = ball_volume(h, {identity(h), 1.0, BallKind::box_d});
  CHECK(v1.value == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-15));
  const auto v2 = ball_volume(h, {identity(h), 2.0, BallKind::box_d});
  CHECK(v2.value == doctest::Approx(16.0 * v1.value).epsilon(1e-15));
  CHECK_THROWS_AS(ball_volume(h, {identity(h), 1.0, BallKind::box_d}, 999), std::invalid_argument);
}

TEST_CASE("gauge ball volume by Monte Carlo") {
  // |B_rho(0,1)| = pi^2/2 (mpmath oracle, tests/oracles/gauge_oracle.py)
  const GroupSpec h = GroupSpec::heisenberg(1);
  const auto v = ball_volume(h, {identity(h), 1.0, BallKind::gauge}, 1000000, 17);
  CHECK(v.samples == 1000000);
  CHECK(std::abs(v.value - 4.9348022005446793) < 3.0 * v.error);
  // Scaling by r^Q within the combined error.
  const auto v2 = ball_volume(h, {identity(h), 0.5, BallKind::gauge}, 1000000, 18);
  CHECK(std::abs(v2.value * 16.0 - 4.9348022005446793) < 3.0 * 16.0 * v2.error);
}

TEST_CASE("ball sampling is thread-count independent and reproducible") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const BallSpec ball{Point(h, {0.3, 0.1, -0.2}), 0.7, BallKind::box_d};
  auto pred = [](const Point& p) { return p[0] < 0.25; };
  const auto a = ball_fraction(h, ball, 200000, 99, pred);
  const auto b = ball_fraction(h, ball, 200000, 99, pred);
  CHECK(a.value == b.value);
  CHECK(a.trail.size() == 4);
}

TEST_CASE("box ball diameter is 2r") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const double d = ball_diameter_estimate(h, {identity(h), 1.0, BallKind::box_d}, 3000, 4);
  CHECK(d == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("d and rho are equivalent") {
  // On the unit gauge sphere of H^1 with eps = 1/2, d ranges over [17^{-1/4}, 1]:
  // max(a, (1 - a^4)^{1/4} / 2) is smallest at a^4 = 1/17.
  const GroupSpec h = GroupSpec::heisenberg(1, 0.5);
  const auto c = d_gauge_equivalence(h, 100000, 2);
  CHECK(c.min_ratio >= std::pow(17.0, -0.25) - 1e-12);
  CHECK(c.min_ratio < std::pow(17.0, -0.25) + 0.01);
  CHECK(c.max_ratio <= 1.0 + 1e-12);
  CHECK(c.max_ratio > 0.99);
}

TEST_CASE("triangle inequality is recorded") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const double gauge = triangle_violation(h, BallKind::gauge, 100000, 8);
  const double box = triangle_violation(h, BallKind::box_d, 100000, 8);
  MESSAGE("largest triangle excess: gauge " << gauge << ", box " << box);
  CHECK(gauge <= 1e-12);
  CHECK(std::isfinite(box));
}
