#include <doctest.h>

#include "carnot/group.hpp"

#include <random>

using namespace carnot;

namespace {

Point random_point(const GroupSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Point p(spec.m(), spec.n());
  for (int k = 0; k < spec.dim(); ++k) p[k] = u(rng);
  return p;
}

double dist(const Point& a, const Point& b) { return (a.coords() - b.coords()).cwiseAbs().maxCoeff(); }

std::vector<GroupSpec> specs() {
  return {GroupSpec::heisenberg(1), GroupSpec::heisenberg(2), GroupSpec::quaternionic(), GroupSpec::free_step2(3)};
}

}  // namespace

TEST_CASE("validate_spec accepts the built-in groups") {
  for (const auto& spec : specs()) {
    const auto report = validate_spec(spec);
    CHECK(report.ok());
    CHECK(report.generation_rank == spec.n());
  }
}

TEST_CASE("validate_spec flags antisymmetry") {
  const GroupSpec bad(2, 1, {{0, 1, 0, 1.0}, {1, 0, 0, 1.0}});
  const auto report = validate_spec(bad);
  REQUIRE_FALSE(report.ok());
  CHECK(report.failures.front().find("antisymmetry") != std::string::npos);
}

TEST_CASE("validate_spec flags a generation rank deficit") {
  const GroupSpec bad(2, 2, {{0, 1, 0, 1.0}, {1, 0, 0, -1.0}});
  const auto report = validate_spec(bad);
  CHECK(report.generation_rank == 1);
  REQUIRE_FALSE(report.ok());
  CHECK(report.failures.back().find("rank 1 < n = 2") != std::string::npos);
}

TEST_CASE("validate_spec flags eps outside (0,1)") {
  CHECK_FALSE(validate_spec(GroupSpec::heisenberg(1, 1.5)).ok());
  CHECK_FALSE(validate_spec(GroupSpec::heisenberg(1, 0.0)).ok());
}

TEST_CASE("H1 products by hand") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Point p = multiply(h, Point(h, {1, 0, 0}), Point(h, {0, 1, 0}));
  CHECK(dist(p, Point(h, {1, 1, 0.5})) == 0.0);
  const Point a(h, {1, 2, 3}), b(h, {4, 5, 6}), c(h, {7, 8, 9});
  CHECK(dist(multiply(h, multiply(h, a, b), c), multiply(h, a, multiply(h, b, c))) < 1e-12);
}

TEST_CASE("group axioms on random triples") {
  std::mt19937_64 rng(11);
  for (const auto& spec : specs()) {
    const Point e = identity(spec);
    for (int k = 0; k < 1000; ++k) {
      const Point p = random_point(spec, rng), q = random_point(spec, rng), r = random_point(spec, rng);
      CHECK(dist(multiply(spec, multiply(spec, p, q), r), multiply(spec, p, multiply(spec, q, r))) < 1e-12);
      CHECK(dist(multiply(spec, p, inverse(p)), e) < 1e-12);
      CHECK(dist(multiply(spec, e, p), p) == 0.0);
    }
  }
}

TEST_CASE("dilations") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  CHECK(dist(dilate(h, 2.0, Point(h, {1, 1, 1})), Point(h, {2, 2, 4})) == 0.0);
  const Point p(h, {0.3, -0.7, 1.1});
  CHECK(dist(dilate(h, 1.0, p), p) == 0.0);
  const Point lhs = dilate(h, 3.0, multiply(h, Point(h, {1, 0, 0}), Point(h, {0, 1, 0})));
  const Point rhs = multiply(h, dilate(h, 3.0, Point(h, {1, 0, 0})), dilate(h, 3.0, Point(h, {0, 1, 0})));
  CHECK(dist(lhs, Point(h, {3, 3, 4.5})) < 1e-15);
  CHECK(dist(lhs, rhs) < 1e-15);
  CHECK_THROWS_AS(dilate(h, 0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(dilate(h, -1.0, p), std::invalid_argument);

  std::mt19937_64 rng(5);
  for (const auto& spec : specs()) {
    CHECK(dilation_jacobian(spec, 1.7) == doctest::Approx(std::pow(1.7, spec.homogeneous_dimension())).epsilon(1e-15));
    CHECK(dilation_matrix(spec, 1.7).determinant() ==
          doctest::Approx(dilation_jacobian(spec, 1.7)).epsilon(1e-13));
    for (int k = 0; k < 200; ++k) {
      const Point a = random_point(spec, rng), b = random_point(spec, rng);
      CHECK(dist(dilate(spec, 0.6, multiply(spec, a, b)), multiply(spec, dilate(spec, 0.6, a), dilate(spec, 0.6, b))) <
            1e-12);
      CHECK(dist(dilate(spec, 0.6, dilate(spec, 2.5, a)), dilate(spec, 1.5, a)) < 1e-12);
    }
  }
}

TEST_CASE("frame values") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Mat X = frame(h, Point(h, {1, 2, 0}));
  CHECK(X(0, 0) == 1.0);
  CHECK(X(0, 1) == 0.0);
  CHECK(X(0, 2) == -1.0);
  CHECK(X(1, 0) == 0.0);
  CHECK(X(1, 1) == 1.0);
  CHECK(X(1, 2) == 0.5);
  for (const auto& spec : specs()) {
    const Mat X0 = frame(spec, identity(spec));
    CHECK((X0 - Mat::Identity(spec.m(), spec.dim())).norm() == 0.0);
  }
}

TEST_CASE("frame is left invariant and matches d/dt p.exp(t e_i)") {
  std::mt19937_64 rng(3);
  for (const auto& spec : specs()) {
    // A fixed non-symmetric polynomial.
    auto f = [&](const Point& q) {
      double v = 0.0;
      for (int k = 0; k < q.dim(); ++k) v += (k + 1) * q[k] * q[k] * q[(k + 1) % q.dim()] + q[k];
      return v;
    };
    auto grad = [&](const Point& q) {
      Vec g(q.dim());
      const double h = 1e-5;
      Point a = q, b = q;
      for (int k = 0; k < q.dim(); ++k) {
        a[k] += h;
        b[k] -= h;
        g[k] = (f(a) - f(b)) / (2 * h);
        a[k] = q[k];
        b[k] = q[k];
      }
      return g;
    };
    for (int trial = 0; trial < 20; ++trial) {
      const Point p = random_point(spec, rng), q = random_point(spec, rng);
      const Point pq = multiply(spec, p, q);
      auto ftau = [&](const Point& x) { return f(multiply(spec, p, x)); };
      for (int i = 0; i < spec.m(); ++i) {
        // X_i(f o tau_p)(q)
        Vec gq(q.dim());
        {
          const double h = 1e-5;
          Point a = q, b = q;
          for (int k = 0; k < q.dim(); ++k) {
            a[k] += h;
            b[k] -= h;
            gq[k] = (ftau(a) - ftau(b)) / (2 * h);
            a[k] = q[k];
            b[k] = q[k];
          }
        }
        const double lhs = frame(spec, q).row(i).dot(gq);
        const double rhs = frame(spec, pq).row(i).dot(grad(pq));
        CHECK(std::abs(lhs - rhs) < 1e-6 * (1.0 + std::abs(rhs)));
        // X_i(p) = d/dt p.(t e_i) at t = 0
        Point step = identity(spec);
        const double h = 1e-6;
        step[i] = h;
        const Point fwd = multiply(spec, p, step);
        step[i] = -h;
        const Point bwd = multiply(spec, p, step);
        const Vec dir = (fwd.coords() - bwd.coords()) / (2 * h);
        CHECK((dir - frame(spec, p).row(i).transpose()).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("J map") {
  const GroupSpec h = GroupSpec::heisenberg(1);
  const Vec one = Vec::Constant(1, 1.0);
  CHECK((j_apply(h, one, Vec::Unit(2, 0)) - Vec::Unit(2, 1)).norm() == 0.0);
  CHECK((j_apply(h, one, Vec::Unit(2, 1)) + Vec::Unit(2, 0)).norm() == 0.0);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (const auto& spec : specs()) {
    const bool htype = is_heisenberg_type(spec).is_htype;
    for (int k = 0; k < 200; ++k) {
      Vec xi(spec.m()), eta(spec.n()), eta2(spec.n());
      for (int i = 0; i < spec.m(); ++i) xi[i] = g(rng);
      for (int l = 0; l < spec.n(); ++l) {
        eta[l] = g(rng);
        eta2[l] = g(rng);
      }
      const Vec J = j_apply(spec, eta, xi);
      CHECK(std::abs(J.dot(xi)) < 1e-12 * (1 + xi.squaredNorm() * eta.norm()));
      CHECK((j_matrix(spec, eta) * xi - J).norm() < 1e-12);
      if (htype) {
        CHECK(std::abs(J.norm() - eta.norm() * xi.norm()) < 1e-12 * (1 + J.norm()));
        CHECK(std::abs(J.dot(j_apply(spec, eta2, xi)) - eta.dot(eta2) * xi.squaredNorm()) <
              1e-12 * (1 + xi.squaredNorm() * eta.norm() * eta2.norm()));
      }
    }
    CHECK(j_apply(spec, Vec::Zero(spec.n()), Vec::Ones(spec.m())).norm() == 0.0);
  }
}

TEST_CASE("Heisenberg type detection") {
  const auto h1 = is_heisenberg_type(GroupSpec::heisenberg(1));
  CHECK(h1.is_htype);
  CHECK(h1.residual == 0.0);
  CHECK(is_heisenberg_type(GroupSpec::heisenberg(3)).is_htype);
  CHECK(is_heisenberg_type(GroupSpec::quaternionic()).is_htype);
  const auto free3 = is_heisenberg_type(GroupSpec::free_step2(3));
  CHECK_FALSE(free3.is_htype);
  CHECK(free3.residual > 0.5);
}
