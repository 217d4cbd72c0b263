#include <doctest.h>

#include "carnot/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace carnot;

namespace {

Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Box b{Vec(static_cast<int>(lo.size())), Vec(static_cast<int>(hi.size()))};
  int k = 0;
  for (double v : lo) b.lo[k++] = v;
  k = 0;
  for (double v : hi) b.hi[k++] = v;
  return b;
}

}  // namespace

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
  for (int n : {1, 2, 5, 8, 16, 33}) {
    const GaussRule& g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(sum - exact) < 1e-14);
    }
  }
  CHECK(&gauss_legendre(12) == &gauss_legendre(12));
}

TEST_CASE("1d and box integrals") {
  const auto e = integrate_1d(0.0, std::numbers::pi, [](double x) { return std::sin(x); });
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.error <= 1e-8 * 2.0);

  const auto v = integrate_box(box({0, 0, 0}, {1, 2, 3}), [](std::span<const double>) { return 1.0; });
  CHECK(v.value == doctest::Approx(6.0).epsilon(1e-14));
  const auto g = integrate_box(box({-1, -1}, {1, 1}),
                               [](std::span<const double> x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
  const double erf1 = std::erf(1.0);
  CHECK(g.value == doctest::Approx(std::numbers::pi * erf1 * erf1).epsilon(1e-12));

  QuadratureOptions fixed;
  fixed.fixed_order = 4;
  const auto f4 = integrate_1d(0.0, 1.0, [](double x) { return std::pow(x, 7); }, fixed);
  CHECK(f4.value == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("composite edges agree with one panel") {
  auto f = [](std::span<const double> x) { return std::cos(x[0]) * (1 + x[1] * x[1]); };
  const Box b = box({0, -1}, {2, 1});
  const double one = tensor_gauss(b, 20, 1, f);
  const double many = tensor_gauss_edges(uniform_edges(b, 3), 20, f);
  CHECK(one == doctest::Approx(many).epsilon(1e-13));
}

TEST_CASE("hypersphere charts carry the sphere area") {
  for (int k : {2, 3, 4}) {
    HypersphereMap H(k);
    const auto a = integrate_box(H.angle_box(), [&](std::span<const double> t) { return H.angular_jacobian(t); });
    const double area = k == 2 ? 2 * std::numbers::pi : k == 3 ? 4 * std::numbers::pi : 2 * std::numbers::pi * std::numbers::pi;
    CHECK(a.value == doctest::Approx(area).epsilon(1e-10));
  }
}

TEST_CASE("region volumes") {
  const GroupSpec h = GroupSpec::heisenberg(1, 0.5);
  auto one = [](const Point&) { return 1.0; };
  // box-d ball of H^1 with eps = 1/2: pi r^2 * 2 r^2/eps^2 = 8 pi at r = 1
  const auto bd = integrate_region(Region::box_d_ball(h, identity(h), 1.0), one);
  CHECK(bd.value == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-10));
  // gauge ball: pi^2/2 (mpmath oracle, tests/oracles/gauge_oracle.py)
  const auto gb = integrate_region(Region::gauge_ball(h, identity(h), 1.0), one);
  CHECK(gb.value == doctest::Approx(4.9348022005446793).epsilon(1e-8));

  const Point z(h, {0.4, -1.0, 2.0});
  const auto moved = integrate_region(Region::gauge_ball(h, identity(h), 1.0).translated(h, z), one);
  CHECK(moved.value == doctest::Approx(gb.value).epsilon(1e-12));
  const auto scaled = integrate_region(Region::gauge_ball(h, identity(h), 1.0).dilated(h, 0.5), one);
  CHECK(scaled.value == doctest::Approx(gb.value / 16.0).epsilon(1e-12));

  const auto cyl = integrate_region(Region::cylinder(h, z, 0.5, 0.25), one);
  CHECK(cyl.value == doctest::Approx(std::numbers::pi * 0.25 * 0.5).epsilon(1e-10));

  // {0 < y < x1^2} over [0,1]^2
  const auto sub = integrate_region(
      Region::subgraph(h, box({0, 0}, {1, 1}), 0.0, [](std::span<const double> u) { return u[0] * u[0]; }), one);
  CHECK(sub.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const GroupSpec quat = GroupSpec::quaternionic();
  const auto qb = integrate_region(Region::box_d_ball(quat, identity(quat), 1.0), one);
  // B^4(1) x B^3(4): pi^2/2 * 4/3 pi 64
  CHECK(qb.value == doctest::Approx(std::numbers::pi * std::numbers::pi / 2 * 4.0 / 3.0 * std::numbers::pi * 64).epsilon(1e-8));
}

TEST_CASE("box region membership and first moments") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Region half = Region::box(h, box({-1, -1, -1}, {1, 1, 1}), [](const Point& p) { return p[0] < 0; });
  QuadratureOptions opts;
  opts.fixed_order = 10;
  const auto v = integrate_region(half, [](const Point& p) { return p[1] * p[1]; }, opts);
  CHECK(v.value == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}
