#include <doctest.h>

#include "carnot/variation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace carnot;

namespace {

constexpr double pi = std::numbers::pi;

Box box3(double a, double b) { return Box{Vec::Constant(3, a), Vec::Constant(3, b)}; }

ScalarField cone() {
  return ScalarField{[](const Point& p) { return std::max(0.0, 1.0 - std::hypot(p[0], p[1])); },
                     [](const Point& p) {
                       const double s = std::hypot(p[0], p[1]);
                       if (s >= 1.0 || s == 0.0) return Vec(Vec::Zero(3));
                       return Vec{{-p[0] / s, -p[1] / s, 0.0}};
                     }};
}

Region unit_cylinder(const GroupSpec& h) {
  return Region::first_layer_cylinder(h, identity(h), 1.0, Box{Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)});
}

ScalarField scaled(const ScalarField& f, double c, double shift) {
  return ScalarField{[=](const Point& p) { return c * f(p) + shift; }, [=](const Point& p) { return Vec(c * f.gradient(p)); }};
}

}  // namespace

TEST_CASE("smooth variation") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const auto v = var_h_smooth(h, cone(), unit_cylinder(h));
  CHECK(v.method == VariationMethod::smooth_integral);
  CHECK(v.value == doctest::Approx(2.0 * pi).epsilon(1e-9));

  const ScalarField c{[](const Point&) { return 3.0; }, [](const Point& p) { return Vec(Vec::Zero(p.dim())); }};
  CHECK(var_h_smooth(h, c, unit_cylinder(h)).value == 0.0);

  const ScalarField w{[](const Point& p) { return std::sin(p[0] + 2 * p[2]) + p[1] * p[1]; },
                      [](const Point& p) {
                        const double c = std::cos(p[0] + 2 * p[2]);
                        return Vec{{c, 2 * p[1], 2 * c}};
                      }};
  const Region R = Region::box(h, box3(-1, 1));
  const double base = var_h_smooth(h, w, R).value;
  CHECK(var_h_smooth(h, scaled(w, -2.5, 0.0), R).value == doctest::Approx(2.5 * base).epsilon(1e-10));
  CHECK(var_h_smooth(h, scaled(w, 1.0, 7.0), R).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sup dictionary bounds the variation from below") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  // chi_{x1<0} on [-1,1]^3: the plane patch has H-perimeter 4.
  SupOptions opts;
  opts.breaks = {{0.0}, {}, {}};
  const auto chi = var_h_sup(h, [](const Point& p) { return p[0] < 0.0 ? 1.0 : 0.0; }, box3(-1, 1), opts);
  CHECK(chi.method == VariationMethod::sup_dictionary);
  REQUIRE(chi.witness.has_value());
  CHECK_FALSE(chi.witness->describe().empty());
  CHECK(chi.value <= 4.0 + 1e-8);
  CHECK(chi.value >= 0.95 * 4.0);

  // Below the smooth integral on a C^1 input.
  const ScalarField lin{[](const Point& p) { return p[0] + 0.5 * p[2]; },
                        [](const Point&) { return Vec{{1.0, 0.0, 0.5}}; }};
  const double smooth = var_h(h, lin, box3(-1, 1), VariationMethod::smooth_integral).value;
  const double sup = var_h(h, lin, box3(-1, 1), VariationMethod::sup_dictionary).value;
  CHECK(sup <= smooth + 1e-8);
  CHECK(sup > 0.5 * smooth);

  // Homogeneity of the sup path.
  const auto twice = var_h_sup(h, [](const Point& p) { return p[0] < 0.0 ? -2.0 : 0.0; }, box3(-1, 1), opts);
  CHECK(twice.value == doctest::Approx(2.0 * chi.value).epsilon(1e-10));
  const auto shifted = var_h_sup(h, [](const Point& p) { return p[0] < 0.0 ? 4.0 : 3.0; }, box3(-1, 1), opts);
  CHECK(shifted.value == doctest::Approx(chi.value).epsilon(1e-8));

  const auto flat = var_h_sup(h, [](const Point&) { return 1.0; }, box3(-1, 1));
  CHECK(flat.value < 1e-10);

  CHECK_THROWS_AS(var_h(h, lin, box3(-1, 1), VariationMethod::coarea_slices), std::invalid_argument);
  Box open = box3(-1, 1);
  open.hi[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(var_h(h, lin, open, VariationMethod::smooth_integral), std::invalid_argument);
}

TEST_CASE("dictionary monomials") {
  CHECK(monomial_count(3) == 10);
  CHECK(monomial_count(1) == 3);
  Vec z{{0.5, -0.25, 2.0}};
  Vec g;
  for (int k = 0; k < monomial_count(3); ++k) {
    g.resize(3);
    const double v = monomial(k, z, &g);
    for (int j = 0; j < 3; ++j) {
      Vec a = z, b = z;
      a[j] += 1e-6;
      b[j] -= 1e-6;
      CHECK(std::abs((monomial(k, a) - monomial(k, b)) / 2e-6 - g[j]) < 1e-8);
    }
    CHECK(std::isfinite(v));
  }
  CHECK(monomial(0, z) == 1.0);
}

TEST_CASE("coarea on the cylinder") {
  // |dA_t|_H = 4 pi (1 - t) on the lateral cylinder, integral 2 pi.
  const GroupSpec h = GroupSpec::heisenberg(1);
  const auto levels = cylinder_level_sets(h, [](double t) { return 1.0 - t; }, Box{Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)});
  const auto rep = coarea_check(h, cone(), unit_cylinder(h), levels, 0.0, 1.0);
  CHECK(rep.lhs == doctest::Approx(2.0 * pi).epsilon(1e-9));
  CHECK(rep.rhs == doctest::Approx(2.0 * pi).epsilon(1e-9));
  CHECK(rep.gap < 1e-3);

  const ScalarField c{[](const Point&) { return 0.5; }, [](const Point& p) { return Vec(Vec::Zero(p.dim())); }};
  const auto flat = coarea_check(h, c, unit_cylinder(h), [](double) { return std::vector<LevelPiece>{}; }, 0.0, 1.0);
  CHECK(flat.lhs == 0.0);
  CHECK(flat.rhs == 0.0);
  CHECK(flat.gap == 0.0);
}

TEST_CASE("coarea on the gauge ball") {
  // u = 1 - rho^4: both sides 6.5233286000183231 (mpmath oracle, tests/oracles/gauge_oracle.py)
  const GroupSpec h = GroupSpec::heisenberg(1);
  const ScalarField f = gauge_ball_function(h, identity(h), 1.0);
  const ScalarField u{[=](const Point& p) { return -f(p); }, [=](const Point& p) { return Vec(-f.gradient(p)); }};
  const auto levels = gauge_level_sets(h, identity(h), [](double t) { return std::pow(1.0 - t, 0.25); });
  const auto rep = coarea_check(h, u, Region::gauge_ball(h, identity(h), 1.0), levels, 0.0, 1.0);
  CHECK(rep.lhs == doctest::Approx(6.5233286000183231).epsilon(1e-7));
  CHECK(rep.rhs == doctest::Approx(6.5233286000183231).epsilon(1e-3));
  CHECK(rep.gap < 1e-2);
}

TEST_CASE("coarea through implicit level sets") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Box base{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
  // u = x1 on the unit box: every level set is a plane of H-perimeter 4.
  const ScalarField u{[](const Point& p) { return p[0]; }, [](const Point&) { return Vec{{1.0, 0.0, 0.0}}; }};
  const auto levels = implicit_level_sets(h, u, graph_lines(h, 0, base, -1.0, 1.0));
  const auto rep = coarea_check(h, u, Region::box(h, box3(-1, 1)), levels, -1.0, 1.0, 16);
  CHECK(rep.lhs == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(rep.rhs == doctest::Approx(8.0).epsilon(1e-8));
}

TEST_CASE("Poincare ratio") {
  // mpmath oracle, tests/oracles/ratio_oracle.py
  const GroupSpec h = GroupSpec::heisenberg(1);
  const ScalarField x1{[](const Point& p) { return p[0]; }, [](const Point&) { return Vec{{1.0, 0.0, 0.0}}; }};
  // Four panels per angle put cell edges on {x1 = 0}, where |x1|^{4/3} has its kink.
  QuadratureOptions opts;
  opts.panels = 4;
  const auto r = poincare_report(h, x1, identity(h), 1.0, opts);
  REQUIRE(r.defined);
  CHECK(r.denominator == doctest::Approx(4.9348022005446793).epsilon(1e-8));
  CHECK(r.numerator == doctest::Approx(1.3759487986562729).epsilon(1e-7));
  CHECK(r.value == doctest::Approx(0.27882552182221253).epsilon(1e-7));
  // Without aligned edges the kink limits the same rule to a few parts in 1e5.
  CHECK(poincare_report(h, x1, identity(h), 1.0).value == doctest::Approx(0.27882552182221253).epsilon(1e-4));

  const ScalarField c{[](const Point&) { return 2.0; }, [](const Point& p) { return Vec(Vec::Zero(p.dim())); }};
  const auto u = poincare_report(h, c, identity(h), 1.0);
  CHECK_FALSE(u.defined);
  CHECK(std::isnan(u.value));
  CHECK_FALSE(u.note.empty());
}

TEST_CASE("Poincare ratios of a family are left invariant") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  const Point z(h, {0.7, -1.3, 2.1});
  QuadratureOptions opts;
  opts.fixed_order = 12;
  double best = 0.0, best_moved = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec a{{g(rng), g(rng), g(rng)}};
    const double b = g(rng);
    ScalarField u{[=](const Point& p) { return std::sin(a.dot(p.coords())) + b * p[0] * p[1]; }, {}};
    ScalarField moved{[=](const Point& p) { return u(multiply(h, inverse(z), p)); }, {}};
    const auto r0 = poincare_report(h, u, identity(h), 1.0, opts);
    const auto r1 = poincare_report(h, moved, z, 1.0, opts);
    REQUIRE(r0.defined);
    REQUIRE(r1.defined);
    CHECK(std::isfinite(r0.value));
    best = std::max(best, r0.value);
    best_moved = std::max(best_moved, r1.value);
  }
  CHECK(best_moved == doctest::Approx(best).epsilon(0.01));
}

TEST_CASE("isoperimetric ratio") {
  // mpmath oracle, tests/oracles/ratio_oracle.py
  const GroupSpec h = GroupSpec::heisenberg(1);
  auto E = [](const Point& p) { return p[0] < 0.0; };
  const SurfacePatch plane = coordinate_plane(h, 0, 0.0, Box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)});
  const auto r = isoperimetric_report(h, E, plane, identity(h), 1.0);
  REQUIRE(r.defined);
  CHECK(r.denominator == doctest::Approx(3.4960767390561597).epsilon(1e-4));
  CHECK(r.numerator == doctest::Approx(1.9687012432153025).epsilon(2e-3));
  CHECK(r.value == doctest::Approx(0.56311728550523614).epsilon(3e-3));

  const auto small = isoperimetric_report(h, E, plane.dilated(h, 0.5), identity(h), 0.5);
  CHECK(small.value == doctest::Approx(r.value).epsilon(0.01));

  const auto none = isoperimetric_report(h, [](const Point& p) { return p[0] < 5.0; },
                                         coordinate_plane(h, 0, 5.0, Box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)}),
                                         identity(h), 1.0, 10000);
  CHECK_FALSE(none.defined);
}

TEST_CASE("bump section") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const HorizontalSection b = bump_section(h, box3(-0.5, 0.5), 1);
  CHECK(b.eval(identity(h))[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.eval(identity(h))[0] == 0.0);
  CHECK(b.eval(Point(h, {0.6, 0, 0})).norm() == 0.0);
  REQUIRE(b.support.has_value());
  REQUIRE(b.jacobian);
  const Point p(h, {0.1, -0.2, 0.3});
  const Mat J = b.jacobian(p);
  for (int k = 0; k < 3; ++k) {
    Point a = p, c = p;
    a[k] += 1e-6;
    c[k] -= 1e-6;
    CHECK(std::abs((b.eval(a)[1] - b.eval(c)[1]) / 2e-6 - J(1, k)) < 1e-8);
  }
}

TEST_CASE("Gauss-Green residual on a vertical plane") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const double a = 0.5;
  const Region vol = Region::box(h, Box{Vec{{-a, -a, -a}}, Vec{{0.0, a, a}}});
  const SurfacePatch plane = coordinate_plane(h, 0, 0.0, Box{Vec::Constant(2, -a), Vec::Constant(2, a)});
  const auto rep = gauss_green_residual(h, vol, plane, bump_section(h, box3(-a, a)));
  REQUIRE(rep.residual.size() == 5);
  CHECK(rep.residual.back() < 1e-6);
  CHECK(rep.rate >= 1.8);
  CHECK(std::abs(rep.volume.back()) > 0.1);

  // Support away from E: both terms vanish.
  const auto off = gauss_green_residual(h, vol, plane, bump_section(h, Box{Vec{{0.1, -a, -a}}, Vec{{0.4, a, a}}}));
  for (std::size_t k = 0; k < off.orders.size(); ++k) {
    CHECK(off.volume[k] == 0.0);
    CHECK(off.surface[k] == 0.0);
  }
}
