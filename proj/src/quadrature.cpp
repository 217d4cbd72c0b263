#include "carnot/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace carnot {

bool Box::contains(const Vec& x) const {
  for (int k = 0; k < dim(); ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  }
  return true;
}

double Box::volume() const { return (hi - lo).prod(); }

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double tensor_gauss_edges(const std::vector<std::vector<double>>& edges, int order, const Integrand& f) {
  const int d = static_cast<int>(edges.size());
  const GaussRule& rule = gauss_legendre(order);

  std::vector<std::vector<double>> nodes(d), weights(d);
  for (int k = 0; k < d; ++k) {
    for (std::size_t p = 0; p + 1 < edges[k].size(); ++p) {
      const double a = edges[k][p];
      const double h = edges[k][p + 1] - a;
      for (int q = 0; q < order; ++q) {
        nodes[k].push_back(a + 0.5 * h * (rule.nodes[q] + 1.0));
        weights[k].push_back(0.5 * h * rule.weights[q]);
      }
    }
  }

  std::vector<double> u(d);
  if (d == 0) return f(u);
  // Nested sums, innermost axis first, so partial sums stay well-scaled.
  auto sum_axis = [&](auto&& self, int k) -> double {
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes[k].size(); ++q) {
      u[k] = nodes[k][q];
      const double v = (k + 1 == d) ? f(u) : self(self, k + 1);
      acc += weights[k][q] * v;
    }
    return acc;
  };
  return sum_axis(sum_axis, 0);
}

std::vector<std::vector<double>> uniform_edges(const Box& box, int panels) {
  std::vector<std::vector<double>> edges(box.dim());
  for (int k = 0; k < box.dim(); ++k) {
    for (int p = 0; p <= panels; ++p) {
      edges[k].push_back(p == panels ? box.hi[k] : box.lo[k] + (box.hi[k] - box.lo[k]) * p / panels);
    }
  }
  return edges;
}

double tensor_gauss(const Box& box, int order, int panels, const Integrand& f) {
  return tensor_gauss_edges(uniform_edges(box, panels), order, f);
}

MeasureEstimate integrate_edges(const std::vector<std::vector<double>>& edges, const Integrand& f,
                                const QuadratureOptions& opts) {
  MeasureEstimate est;
  double cells = 1.0;
  for (const auto& e : edges) {
    if (e.size() < 2) throw std::invalid_argument("integrate_edges: each axis needs at least two edges");
    cells *= static_cast<double>(e.size() - 1);
  }
  const int d = static_cast<int>(edges.size());
  auto cost = [&](int order) { return cells * std::pow(static_cast<double>(order), d); };

  if (opts.fixed_order > 0) {
    est.value = tensor_gauss_edges(edges, opts.fixed_order, f);
    est.order = opts.fixed_order;
    est.samples = static_cast<std::size_t>(cost(opts.fixed_order));
    est.error = std::numeric_limits<double>::quiet_NaN();
    est.trail.emplace_back(opts.fixed_order, est.value);
    return est;
  }

  int order = std::max(1, opts.min_order);
  double prev = tensor_gauss_edges(edges, order, f);
  std::size_t evals = static_cast<std::size_t>(cost(order));
  est.trail.emplace_back(order, prev);
  est.value = prev;
  est.order = order;
  est.error = std::abs(prev);
  est.converged = false;
  while (2 * order <= opts.max_order && evals + cost(2 * order) <= static_cast<double>(opts.max_points)) {
    order *= 2;
    const double next = tensor_gauss_edges(edges, order, f);
    evals += static_cast<std::size_t>(cost(order));
    est.trail.emplace_back(order, next);
    est.error = std::abs(next - prev);
    est.value = next;
    est.order = order;
    if (est.error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(next))) {
      est.converged = true;
      break;
    }
    prev = next;
  }
  est.samples = evals;
  return est;
}

MeasureEstimate integrate_box(const Box& box, const Integrand& f, const QuadratureOptions& opts) {
  if (opts.panels < 1) throw std::invalid_argument("integrate_box: panels must be positive");
  return integrate_edges(uniform_edges(box, opts.panels), f, opts);
}

MeasureEstimate integrate_1d(double a, double b, const std::function<double(double)>& f,
                             const QuadratureOptions& opts) {
  Box box{Vec::Constant(1, a), Vec::Constant(1, b)};
  return integrate_box(box, [&](std::span<const double> u) { return f(u[0]); }, opts);
}

HypersphereMap::HypersphereMap(int k) : k_(k) {
  if (k < 2) throw std::invalid_argument("HypersphereMap: need ambient dimension >= 2");
}

Box HypersphereMap::angle_box() const {
  Box box{Vec::Zero(k_ - 1), Vec::Constant(k_ - 1, std::numbers::pi)};
  box.hi[k_ - 2] = 2.0 * std::numbers::pi;
  return box;
}

// x_1 = cos a1, x_2 = sin a1 cos a2, ..., x_{k-1} = sin a1..sin a_{k-2} cos a_{k-1},
// x_k = sin a1 .. sin a_{k-1}
void HypersphereMap::direction(std::span<const double> angles, Eigen::Ref<Vec> out) const {
  double prod = 1.0;
  for (int j = 0; j < k_ - 1; ++j) {
    out[j] = prod * std::cos(angles[j]);
    prod *= std::sin(angles[j]);
  }
  out[k_ - 1] = prod;
}

void HypersphereMap::direction_jacobian(std::span<const double> angles, Eigen::Ref<Mat> out) const {
  out.setZero();
  std::vector<double> s(k_ - 1), c(k_ - 1);
  for (int j = 0; j < k_ - 1; ++j) {
    s[j] = std::sin(angles[j]);
    c[j] = std::cos(angles[j]);
  }
  // component r depends on angles 0..min(r, k-2)
  for (int r = 0; r < k_; ++r) {
    const int last = std::min(r, k_ - 2);
    for (int a = 0; a <= last; ++a) {
      double v = 1.0;
      for (int j = 0; j < r && j < k_ - 1; ++j) v *= (j == a) ? c[j] : s[j];
      if (r < k_ - 1) v *= (r == a) ? -s[r] : c[r];
      out(r, a) = v;
    }
  }
}

double HypersphereMap::angular_jacobian(std::span<const double> angles) const {
  double jac = 1.0;
  for (int j = 0; j < k_ - 2; ++j) jac *= std::pow(std::sin(angles[j]), k_ - 2 - j);
  return jac;
}

namespace {

// Parameters for a solid ball of radius R in R^k: radius then angles, or the
// interval itself when k = 1. Writes the point into out and returns the
// Jacobian of the chart.
struct BallChart {
  int k;
  double radius;

  int params() const { return k; }
  void fill_box(Box& box, int offset) const {
    if (k == 1) {
      box.lo[offset] = -radius;
      box.hi[offset] = radius;
      return;
    }
    box.lo[offset] = 0.0;
    box.hi[offset] = radius;
    const Box ang = HypersphereMap(k).angle_box();
    for (int j = 0; j < k - 1; ++j) {
      box.lo[offset + 1 + j] = ang.lo[j];
      box.hi[offset + 1 + j] = ang.hi[j];
    }
  }
  double map(std::span<const double> u, Eigen::Ref<Vec> out) const {
    if (k == 1) {
      out[0] = u[0];
      return 1.0;
    }
    const HypersphereMap sphere(k);
    const auto angles = u.subspan(1, k - 1);
    sphere.direction(angles, out);
    out *= u[0];
    return std::pow(u[0], k - 1) * sphere.angular_jacobian(angles);
  }
};

}  // namespace

Region Region::box(const GroupSpec& spec, Box ambient, std::function<bool(const Point&)> membership) {
  if (ambient.dim() != spec.dim()) throw std::invalid_argument("Region::box: dimension mismatch");
  const int m = spec.m();
  return Region(spec.m(), spec.n(), ambient,
                [m, membership](std::span<const double> u, Point& out) {
                  for (std::size_t k = 0; k < u.size(); ++k) out[static_cast<int>(k)] = u[k];
                  (void)m;
                  if (membership && !membership(out)) return 0.0;
                  return 1.0;
                });
}

Region Region::cylinder(const GroupSpec& spec, const Point& center, double first_radius,
                        double second_radius) {
  if (!(first_radius > 0.0) || !(second_radius > 0.0)) {
    throw std::invalid_argument("Region::cylinder: radii must be positive");
  }
  const int m = spec.m();
  const int n = spec.n();
  const BallChart a{m, first_radius};
  const BallChart b{n, second_radius};
  Box params{Vec::Zero(m + n), Vec::Zero(m + n)};
  a.fill_box(params, 0);
  b.fill_box(params, m);
  Region base(m, n, params, [a, b, m, n](std::span<const double> u, Point& out) {
    const double ja = a.map(u.subspan(0, m), out.coords().head(m));
    const double jb = b.map(u.subspan(m, n), out.coords().tail(n));
    return ja * jb;
  });
  return base.translated(spec, center);
}

Region Region::first_layer_cylinder(const GroupSpec& spec, const Point& center, double first_radius,
                                    Box second_box) {
  const int m = spec.m();
  const int n = spec.n();
  if (second_box.dim() != n) throw std::invalid_argument("first_layer_cylinder: second box dimension");
  const BallChart a{m, first_radius};
  Box params{Vec::Zero(m + n), Vec::Zero(m + n)};
  a.fill_box(params, 0);
  params.lo.tail(n) = second_box.lo;
  params.hi.tail(n) = second_box.hi;
  Region base(m, n, params, [a, m, n](std::span<const double> u, Point& out) {
    const double ja = a.map(u.subspan(0, m), out.coords().head(m));
    for (int l = 0; l < n; ++l) out[m + l] = u[m + l];
    return ja;
  });
  return base.translated(spec, center);
}

Region Region::box_d_ball(const GroupSpec& spec, const Point& center, double r) {
  return cylinder(spec, center, r, r * r / (spec.eps() * spec.eps()));
}

Region Region::gauge_ball(const GroupSpec& spec, const Point& center, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("Region::gauge_ball: radius must be positive");
  const int m = spec.m();
  const int n = spec.n();
  const int d = m + n;
  const HypersphereMap sphere(d);
  Box params{Vec::Zero(d), Vec::Zero(d)};
  params.hi[0] = 1.0;
  const Box ang = sphere.angle_box();
  params.lo.tail(d - 1) = ang.lo;
  params.hi.tail(d - 1) = ang.hi;
  const double r4 = std::pow(r, 4);
  Region base(m, n, params, [sphere, m, d, r4](std::span<const double> u, Point& out) {
    const auto angles = u.subspan(1, d - 1);
    Vec v(d);
    sphere.direction(angles, v);
    // polar axis along the last coordinate
    Vec w(d);
    w.head(d - 1) = v.tail(d - 1);
    w[d - 1] = v[0];
    const double a = std::pow(w.head(m).squaredNorm(), 2);
    const double b = w.tail(d - m).squaredNorm();
    // a R^4 + b R^2 = r^4
    const double R2 = 2.0 * r4 / (b + std::sqrt(b * b + 4.0 * a * r4));
    const double R = std::sqrt(R2);
    const double rad = u[0] * R;
    out.coords() = rad * w;
    return std::pow(rad, d - 1) * R * sphere.angular_jacobian(angles);
  });
  return base.translated(spec, center);
}

Region Region::subgraph(const GroupSpec& spec, Box base, double lower,
                        std::function<double(std::span<const double>)> upper) {
  const int d = spec.dim();
  if (base.dim() != d - 1) throw std::invalid_argument("Region::subgraph: base must have dimension m+n-1");
  Box params{Vec::Zero(d), Vec::Ones(d)};
  params.lo.head(d - 1) = base.lo;
  params.hi.head(d - 1) = base.hi;
  return Region(spec.m(), spec.n(), params, [d, lower, upper](std::span<const double> u, Point& out) {
    const double top = upper(u.subspan(0, d - 1));
    if (!(top > lower)) return 0.0;
    for (int k = 0; k < d - 1; ++k) out[k] = u[k];
    out[d - 1] = lower + u[d - 1] * (top - lower);
    return top - lower;
  });
}

Region Region::translated(const GroupSpec& spec, const Point& z) const {
  if (z.coords().isZero(0.0)) return *this;
  const GroupSpec copy = spec;
  const Map inner = map_;
  return Region(m_, n_, params_, [copy, z, inner](std::span<const double> u, Point& out) {
    const double jac = inner(u, out);
    if (jac == 0.0) return 0.0;
    out = multiply(copy, z, out);
    return jac;
  });
}

Region Region::dilated(const GroupSpec& spec, double r) const {
  const GroupSpec copy = spec;
  const Map inner = map_;
  const double scale = dilation_jacobian(spec, r);
  return Region(m_, n_, params_, [copy, r, scale, inner](std::span<const double> u, Point& out) {
    const double jac = inner(u, out);
    if (jac == 0.0) return 0.0;
    out = dilate(copy, r, out);
    return jac * scale;
  });
}

MeasureEstimate integrate_region(const Region& region, const std::function<double(const Point&)>& f,
                                 const QuadratureOptions& opts) {
  const int m = region.m();
  const int n = region.n();
  return integrate_box(
      region.params(),
      [&](std::span<const double> u) {
        thread_local Point p;
        if (p.dim() != m + n || p.m() != m) p = Point(m, n);
        const double jac = region.map(u, p);
        if (jac == 0.0) return 0.0;
        return jac * f(p);
      },
      opts);
}

}  // namespace carnot
