#include <doctest.h>

#include "carnot/admissibility.hpp"

#include <cmath>
#include <numbers>

using namespace carnot;

namespace {

// F(1/N) for N = 1e2, 1e3, 1e4, 1e6 (mpmath oracle, tests/oracles/counterexample_oracle.py)
struct FRow {
  double deficit;
  double F[4];
  double slope;  // over N = 1e2..1e6
};
constexpr FRow kOracle[] = {
    {0.25, {1.2399557904253073, 1.7153425313201072, 2.3779936437079123, 4.5828707132380137}, 0.141966140363},
    {0.5, {2.7900777733630231, 6.0023804382113426, 12.927713228954489, 60.000238094723694}, 0.333157572684},
    {0.75, {8.8066445419237018, 35.053608439606687, 139.54935235684075, 2211.7065097733485}, 0.599982884204},
};

Domain paraboloid() {
  ScalarField phi{[](const Point& p) { return p[2] - 1.0 + p[0] * p[0] + p[1] * p[1]; },
                  [](const Point& p) { return Vec{{2 * p[0], 2 * p[1], 1.0}}; }};
  return Domain{phi, Box{Vec{{-1.2, -1.2, -0.5}}, Vec{{1.2, 1.2, 1.5}}}, "paraboloid"};
}

}  // namespace

TEST_CASE("counterexample F against the oracle") {
  const double Ns[] = {1e2, 1e3, 1e4, 1e6};
  for (const auto& row : kOracle) {
    for (int k = 0; k < 4; ++k) {
      CHECK(counterexample_F(row.deficit, 1.0 / Ns[k]) == doctest::Approx(row.F[k]).epsilon(1e-12));
    }
  }
  // The smooth paraboloid: F = sqrt(17)/6 for every N.
  CHECK(counterexample_F(0.0, 1e-3) == doctest::Approx(0.68718427093627676).epsilon(1e-13));
  CHECK(counterexample_F(0.0, 1.0) == doctest::Approx(0.68718427093627676).epsilon(1e-13));
  CHECK_THROWS_AS(counterexample_F(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(counterexample_F(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(counterexample_F(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(counterexample_F(0.5, 2.0), std::invalid_argument);
}

TEST_CASE("counterexample sweep") {
  const std::vector<double> Ns{1e2, 1e3, 1e4, 1e5, 1e6};
  const auto sweep = counterexample_sweep({0.25, 0.5, 0.75}, Ns);
  REQUIRE(sweep.rows.size() == 15);
  REQUIRE(sweep.slopes.size() == 3);
  for (std::size_t d = 0; d < 3; ++d) {
    const double e = kOracle[d].deficit;
    CHECK(sweep.slopes[d] == doctest::Approx(kOracle[d].slope).epsilon(1e-9));
    CHECK(std::abs(sweep.slopes[d] - e / (2 - e)) < 0.02 * e / (2 - e));
    const double target = (2 - e) / (3 - e);
    CHECK(sweep.prefactors[d] == doctest::Approx(target).epsilon(1e-3));
  }
  int k = 0;
  for (const auto& row : sweep.rows) {
    CHECK(row.N == Ns[k % 5]);
    // The two routes: surface quadrature of both perimeters against the reduced integral.
    CHECK(row.ratio == doctest::Approx(6.0 * row.F).epsilon(1e-10));
    CHECK(row.rel_err < 1e-12);
    CHECK(row.closed_form == doctest::Approx(std::numbers::pi / 3 * std::pow(row.N, -3.0 / (2 - row.deficit))).epsilon(1e-15));
    ++k;
  }
  const auto& mid = sweep.rows[5 + 1];  // deficit 0.5, N = 1000
  CHECK(mid.deficit == 0.5);
  CHECK(mid.perim_top.value == doctest::Approx(1.0471975511965977e-6).epsilon(1e-12));
  CHECK(mid.perim_side.value == doctest::Approx(3.7714068577471675e-5).epsilon(1e-10));
  CHECK(mid.ratio == doctest::Approx(36.014282629268055).epsilon(1e-10));

  const auto smooth = counterexample_sweep({0.0}, {10, 100, 1000, 10000});
  for (const auto& row : smooth.rows) CHECK(row.ratio == doctest::Approx(std::sqrt(17.0)).epsilon(1e-10));
  CHECK(std::abs(smooth.slopes[0]) < 1e-10);

  CHECK_THROWS_AS(counterexample_sweep({1.2}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(counterexample_sweep({0.5}, {0.5}), std::invalid_argument);
}

TEST_CASE("admissibility ratio") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const double R = std::pow(1000.0, -0.5);
  const BoundaryPiece side{radial_graph(h, [](double s) { return 1 - s * s; }, [](double s) { return -2 * s; }, 0.0, R),
                           {}};
  const BoundaryPiece top{horizontal_disk(h, 1 - 1e-3, R), {}};
  const auto r = admissibility_ratio(h, {side}, {top});
  CHECK(r.ratio == doctest::Approx(std::sqrt(17.0)).epsilon(1e-10));
  CHECK_FALSE(r.infinite);
  CHECK(r.numerator.value > 0.0);

  const auto empty = admissibility_ratio(h, {}, {top});
  CHECK(empty.ratio == 0.0);
  CHECK_FALSE(empty.infinite);

  // A vertical plane has no horizontal-disk counterpart: zero denominator.
  const BoundaryPiece nothing{horizontal_disk(h, 0.0, 1.0), [](const Point&) { return false; }};
  const auto inf = admissibility_ratio(h, {side}, {nothing});
  CHECK(inf.infinite);
  CHECK(std::isinf(inf.ratio));

  const Point z(h, {0.3, -0.8, 4.0});
  const auto moved = admissibility_ratio(h, {{side.patch.translated(h, z), {}}}, {{top.patch.translated(h, z), {}}});
  CHECK(std::abs(moved.ratio - r.ratio) < 1e-8);
  const auto shrunk = admissibility_ratio(h, {{side.patch.dilated(h, 0.3), {}}}, {{top.patch.dilated(h, 0.3), {}}});
  CHECK(std::abs(shrunk.ratio - r.ratio) < 1e-8);
}

TEST_CASE("partial symmetry bound") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const auto sq = partial_symmetry_bound(h, GraphProfile{[](double s, const Vec&) { return 2 * s; }, {}});
  CHECK(sq.M == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sq.L == 1.0);
  CHECK(sq.bound == doctest::Approx(std::sqrt(17.0) / 2).epsilon(1e-12));
  CHECK(sq.tight_bound == doctest::Approx(std::sqrt(17.0)).epsilon(1e-12));
  CHECK(sq.satisfied);
  CHECK(sq.verdict == "partial symmetry satisfied");
  CHECK(sq.warning.empty());

  const auto holder = partial_symmetry_bound(h, GraphProfile{[](double s, const Vec&) { return 1.5 * std::sqrt(s); }, {}});
  CHECK_FALSE(holder.satisfied);
  CHECK(std::isinf(holder.M));
  CHECK(holder.verdict.rfind("partial symmetry failed", 0) == 0);
  CHECK(holder.quotient_slope == doctest::Approx(-0.5).epsilon(1e-6));

  const auto flat = partial_symmetry_bound(h, GraphProfile{[](double, const Vec&) { return 0.0; }, {}});
  CHECK(flat.M == 0.0);
  CHECK(flat.L == 1.0);
  CHECK(flat.bound == doctest::Approx(0.5).epsilon(1e-15));

  const auto free3 = partial_symmetry_bound(GroupSpec::free_step2(3), GraphProfile{[](double s, const Vec&) { return 2 * s; },
                                                                                 [](double, const Vec& y) { return Vec(Vec::Zero(y.size())); }},
                                            ProbeRegion{1e-4, 0.5, 40, Box{Vec::Constant(2, -0.5), Vec::Constant(2, 0.5)}, 3});
  CHECK_FALSE(free3.warning.empty());
}

TEST_CASE("partial symmetry from a domain") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Domain dom = paraboloid();
  const auto here = partial_symmetry_bound(h, profile_from_domain(h, dom, Point(h, {0, 0, 1})));
  CHECK(here.M == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(here.L == 1.0);
  CHECK(here.satisfied);

  // The same surface moved by a left translation.
  const Point z(h, {0.4, 1.1, -0.7});
  const Domain moved{ScalarField{[&](const Point& p) { return dom.phi(multiply(h, inverse(z), p)); }, {}}, dom.bbox,
                     "moved"};
  const auto there = partial_symmetry_bound(h, profile_from_domain(h, moved, multiply(h, z, Point(h, {0, 0, 1}))));
  CHECK(there.M == doctest::Approx(here.M).epsilon(1e-6));
  CHECK(there.bound == doctest::Approx(here.bound).epsilon(1e-6));

  // A C^{1,1/2} cap fails.
  const Domain cusp{ScalarField{[](const Point& p) { return p[2] - 1.0 + std::pow(std::hypot(p[0], p[1]), 1.5); }, {}},
                    dom.bbox, "cusp"};
  CHECK_FALSE(partial_symmetry_bound(h, profile_from_domain(h, cusp, Point(h, {0, 0, 1}))).satisfied);
}

TEST_CASE("non-characteristic bound") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Domain half{ScalarField{[](const Point& p) { return p[0]; }, [](const Point&) { return Vec{{1.0, 0.0, 0.0}}; }},
                    Box{Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)}, "halfspace"};
  const auto plane = noncharacteristic_bound(h, half, coordinate_plane(h, 0, 0.0, Box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)}));
  CHECK(plane.K == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(plane.ratio_bound == doctest::Approx(1.0).epsilon(1e-12));

  // The horizontal normal of the paraboloid turns through every direction, so
  // the best frame still sees a 45 degree normal: K = 1/sqrt(2).
  const Domain dom = paraboloid();
  const auto ring = noncharacteristic_bound(
      h, dom, radial_graph(h, [](double s) { return 1 - s * s; }, [](double s) { return -2 * s; }, 0.5, 1.0));
  // Sampled normals sit at discrete angles, so K comes out above 1/sqrt(2) and
  // approaches it as the grid is refined.
  CHECK(ring.K >= 1.0 / std::sqrt(2.0) - 1e-12);
  CHECK(ring.K < 0.8);
  CHECK(ring.ratio_bound == doctest::Approx(1.0 / ring.K));
  CHECK(std::hypot(ring.argmin[0], ring.argmin[1]) >= 0.5 - 1e-12);
  const auto fine = noncharacteristic_bound(
      h, dom, radial_graph(h, [](double s) { return 1 - s * s; }, [](double s) { return -2 * s; }, 0.5, 1.0), 256);
  CHECK(fine.K >= 1.0 / std::sqrt(2.0) - 1e-12);
  CHECK(fine.K < 1.0 / std::sqrt(2.0) + 0.01);
  CHECK(ring.rotation.rows() == 2);
  CHECK((ring.rotation * ring.rotation.transpose() - Mat::Identity(2, 2)).norm() < 1e-12);

  CHECK_THROWS_AS(noncharacteristic_bound(h, dom, coordinate_plane(h, 2, 1.0, Box{Vec::Constant(2, -0.1), Vec::Constant(2, 0.1)}), 1),
                  CharacteristicPointError);
}
