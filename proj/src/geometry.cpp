#include "carnot/geometry.hpp"

#include "carnot/metrics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace carnot {

Vec cross_normal(const Mat& tangents) {
  const int d = static_cast<int>(tangents.rows());
  Vec out(d);
  if (d == 1) {
    out[0] = 1.0;
    return out;
  }
  Mat minor(d - 1, d - 1);
  for (int k = 0; k < d; ++k) {
    for (int r = 0, row = 0; r < d; ++r) {
      if (r == k) continue;
      minor.row(row++) = tangents.row(r);
    }
    const double sign = ((k + d - 1) % 2 == 0) ? 1.0 : -1.0;
    out[k] = sign * minor.determinant();
  }
  return out;
}

bool SurfacePatch::sample(std::span<const double> u, SurfaceSample& out) const {
  const int d = m_ + n_;
  if (out.point.dim() != d || out.point.m() != m_) out.point = Point(m_, n_);
  if (out.tangents.rows() != d || out.tangents.cols() != d - 1) out.tangents.resize(d, d - 1);
  if (!map_(u, out.point, out.tangents)) return false;
  out.normal = orientation_ * cross_normal(out.tangents);
  return true;
}

SurfacePatch SurfacePatch::flipped() const { return SurfacePatch(m_, n_, params_, map_, -orientation_); }

SurfacePatch SurfacePatch::with_params(Box params) const {
  return SurfacePatch(m_, n_, std::move(params), map_, orientation_);
}

namespace {

// Orientation that makes score(sample) positive at the first parameter of a
// coarse grid where the patch is defined.
int orientation_for(const SurfacePatch& patch, const std::function<double(const SurfaceSample&)>& score) {
  const Box& box = patch.params();
  const int k = box.dim();
  SurfaceSample s;
  std::vector<double> u(k);
  const int grid = 5;
  std::vector<int> idx(k, 0);
  // center first
  for (int j = 0; j < k; ++j) u[j] = 0.5 * (box.lo[j] + box.hi[j]);
  auto try_here = [&]() -> int {
    if (!patch.sample(u, s)) return 0;
    const double v = score(s);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
  };
  if (int r = try_here()) return r;
  for (;;) {
    for (int j = 0; j < k; ++j) u[j] = box.lo[j] + (idx[j] + 0.5) / grid * (box.hi[j] - box.lo[j]);
    if (int r = try_here()) return r;
    int j = 0;
    while (j < k && ++idx[j] == grid) idx[j++] = 0;
    if (j == k) break;
  }
  return 1;
}

SurfacePatch oriented(const SurfacePatch& patch, const std::function<double(const SurfaceSample&)>& score) {
  return orientation_for(patch, score) > 0 ? patch : patch.flipped();
}

}  // namespace

SurfacePatch SurfacePatch::oriented_by(const ScalarField& phi) const {
  return oriented(*this, [&](const SurfaceSample& s) { return s.normal.dot(phi.gradient(s.point)); });
}

SurfacePatch SurfacePatch::translated(const GroupSpec& spec, const Point& z) const {
  const GroupSpec g = spec;
  const Mat lin = left_translation_jacobian(spec, z);
  const Map inner = map_;
  return SurfacePatch(m_, n_, params_,
                      [g, z, lin, inner](std::span<const double> u, Point& p, Mat& t) {
                        if (!inner(u, p, t)) return false;
                        p = multiply(g, z, p);
                        t = lin * t;
                        return true;
                      },
                      orientation_);
}

SurfacePatch SurfacePatch::dilated(const GroupSpec& spec, double r) const {
  const GroupSpec g = spec;
  const Mat lin = dilation_matrix(spec, r);
  const Map inner = map_;
  return SurfacePatch(m_, n_, params_,
                      [g, r, lin, inner](std::span<const double> u, Point& p, Mat& t) {
                        if (!inner(u, p, t)) return false;
                        p = dilate(g, r, p);
                        t = lin * t;
                        return true;
                      },
                      orientation_);
}

SurfacePatch coordinate_plane(const GroupSpec& spec, int axis, double value, Box other) {
  const int d = spec.dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("coordinate_plane: axis out of range");
  if (other.dim() != d - 1) throw std::invalid_argument("coordinate_plane: parameter box must have m+n-1 axes");
  SurfacePatch patch(spec.m(), spec.n(), std::move(other),
                     [axis, value, d](std::span<const double> u, Point& p, Mat& t) {
                       t.setZero();
                       for (int k = 0, j = 0; k < d; ++k) {
                         if (k == axis) {
                           p[k] = value;
                           continue;
                         }
                         p[k] = u[j];
                         t(k, j) = 1.0;
                         ++j;
                       }
                       return true;
                     });
  return oriented(patch, [axis](const SurfaceSample& s) { return s.normal[axis]; });
}

namespace {

void require_heisenberg_layers(const GroupSpec& spec, const char* who) {
  if (spec.n() != 1 || spec.m() < 2) {
    throw std::invalid_argument(std::string(who) + ": needs n = 1 and m >= 2");
  }
}

// Radius r(v) = lo + (hi - lo) v^grade and its derivative.
std::pair<double, double> graded(double v, double lo, double hi, int grade) {
  const double span = hi - lo;
  const double vp = std::pow(v, grade - 1);
  return {lo + span * vp * v, span * grade * vp};
}

}  // namespace

SurfacePatch radial_graph(const GroupSpec& spec, std::function<double(double)> g, std::function<double(double)> dg,
                          double r_lo, double r_hi, int grade) {
  require_heisenberg_layers(spec, "radial_graph");
  if (!(r_hi > r_lo) || r_lo < 0.0) throw std::invalid_argument("radial_graph: need 0 <= r_lo < r_hi");
  if (grade < 1) throw std::invalid_argument("radial_graph: grade must be >= 1");
  const int m = spec.m();
  const HypersphereMap sphere(m);
  Box params{Vec::Zero(m), Vec::Zero(m)};
  params.hi[0] = 1.0;
  const Box ang = sphere.angle_box();
  params.lo.tail(m - 1) = ang.lo;
  params.hi.tail(m - 1) = ang.hi;
  SurfacePatch patch(spec.m(), spec.n(), params,
                     [=](std::span<const double> u, Point& p, Mat& t) {
                       const auto [r, dr] = graded(u[0], r_lo, r_hi, grade);
                       const auto angles = u.subspan(1, m - 1);
                       Vec w(m);
                       sphere.direction(angles, w);
                       Mat dw(m, m - 1);
                       sphere.direction_jacobian(angles, dw);
                       p.coords().head(m) = r * w;
                       p[m] = g(r);
                       t.setZero();
                       t.col(0).head(m) = dr * w;
                       t(m, 0) = dg(r) * dr;
                       t.block(0, 1, m, m - 1) = r * dw;
                       return true;
                     });
  return oriented(patch, [m](const SurfaceSample& s) { return s.normal[m]; });
}

SurfacePatch horizontal_disk(const GroupSpec& spec, double height, double radius, int grade) {
  return radial_graph(
      spec, [height](double) { return height; }, [](double) { return 0.0; }, 0.0, radius, grade);
}

SurfacePatch vertical_cylinder(const GroupSpec& spec, double radius, Box second) {
  const int m = spec.m();
  const int n = spec.n();
  if (m < 2) throw std::invalid_argument("vertical_cylinder: needs m >= 2");
  if (second.dim() != n) throw std::invalid_argument("vertical_cylinder: second box must have n axes");
  const HypersphereMap sphere(m);
  Box params{Vec::Zero(m - 1 + n), Vec::Zero(m - 1 + n)};
  const Box ang = sphere.angle_box();
  params.lo.head(m - 1) = ang.lo;
  params.hi.head(m - 1) = ang.hi;
  params.lo.tail(n) = second.lo;
  params.hi.tail(n) = second.hi;
  SurfacePatch patch(m, n, params, [=](std::span<const double> u, Point& p, Mat& t) {
    const auto angles = u.subspan(0, m - 1);
    Vec w(m);
    sphere.direction(angles, w);
    Mat dw(m, m - 1);
    sphere.direction_jacobian(angles, dw);
    p.coords().head(m) = radius * w;
    for (int l = 0; l < n; ++l) p[m + l] = u[m - 1 + l];
    t.setZero();
    t.block(0, 0, m, m - 1) = radius * dw;
    for (int l = 0; l < n; ++l) t(m + l, m - 1 + l) = 1.0;
    return true;
  });
  return oriented(patch, [m](const SurfaceSample& s) {
    return s.normal.head(m).dot(s.point.first());
  });
}

LineFamily graph_lines(const GroupSpec& spec, int axis, Box other, double lo, double hi) {
  const int d = spec.dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("graph_lines: axis out of range");
  if (other.dim() != d - 1) throw std::invalid_argument("graph_lines: base box must have m+n-1 axes");
  LineFamily fam;
  fam.params = std::move(other);
  fam.tau_lo = lo;
  fam.tau_hi = hi;
  fam.lines = [axis, d](std::span<const double> u, Vec& base, Mat& dbase, Vec& dir, Mat& ddir) {
    base = Vec::Zero(d);
    dbase = Mat::Zero(d, d - 1);
    for (int k = 0, j = 0; k < d; ++k) {
      if (k == axis) continue;
      base[k] = u[j];
      dbase(k, j) = 1.0;
      ++j;
    }
    dir = Vec::Unit(d, axis);
    ddir = Mat::Zero(d, d - 1);
  };
  return fam;
}

LineFamily polar_lines(const GroupSpec& spec, double radius, double lo, double hi, int grade) {
  require_heisenberg_layers(spec, "polar_lines");
  const int m = spec.m();
  const int d = m + 1;
  const HypersphereMap sphere(m);
  LineFamily fam;
  fam.params = Box{Vec::Zero(m), Vec::Zero(m)};
  fam.params.hi[0] = 1.0;
  const Box ang = sphere.angle_box();
  fam.params.lo.tail(m - 1) = ang.lo;
  fam.params.hi.tail(m - 1) = ang.hi;
  fam.tau_lo = lo;
  fam.tau_hi = hi;
  fam.lines = [=](std::span<const double> u, Vec& base, Mat& dbase, Vec& dir, Mat& ddir) {
    const auto [r, dr] = graded(u[0], 0.0, radius, grade);
    const auto angles = u.subspan(1, m - 1);
    Vec w(m);
    sphere.direction(angles, w);
    Mat dw(m, m - 1);
    sphere.direction_jacobian(angles, dw);
    base = Vec::Zero(d);
    base.head(m) = r * w;
    dbase = Mat::Zero(d, d - 1);
    dbase.col(0).head(m) = dr * w;
    dbase.block(0, 1, m, m - 1) = r * dw;
    dir = Vec::Unit(d, m);
    ddir = Mat::Zero(d, d - 1);
  };
  return fam;
}

LineFamily star_lines(const GroupSpec& spec, const Point& center, double rmax) {
  const int d = spec.dim();
  const HypersphereMap sphere(d);
  LineFamily fam;
  fam.params = sphere.angle_box();
  fam.tau_lo = 0.0;
  fam.tau_hi = rmax;
  const Vec c = center.coords();
  // The chart's polar axis is the last coordinate, so that for n = 1 the
  // characteristic poles of gauge spheres sit at the chart poles.
  fam.lines = [=](std::span<const double> u, Vec& base, Mat& dbase, Vec& dir, Mat& ddir) {
    base = c;
    dbase = Mat::Zero(d, d - 1);
    Vec w(d);
    sphere.direction(u, w);
    Mat dw(d, d - 1);
    sphere.direction_jacobian(u, dw);
    dir.resize(d);
    dir.head(d - 1) = w.tail(d - 1);
    dir[d - 1] = w[0];
    ddir.resize(d, d - 1);
    ddir.topRows(d - 1) = dw.bottomRows(d - 1);
    ddir.row(d - 1) = dw.row(0);
  };
  return fam;
}

SurfacePatch implicit_patch(const GroupSpec& spec, const ScalarField& phi, LineFamily family, int scan) {
  const int m = spec.m();
  const int n = spec.n();
  const int d = m + n;
  if (scan < 1) throw std::invalid_argument("implicit_patch: scan must be positive");
  SurfacePatch patch(m, n, family.params, [=](std::span<const double> u, Point& p, Mat& t) {
    Vec base, dir;
    Mat dbase, ddir;
    family.lines(u, base, dbase, dir, ddir);
    auto along = [&](double tau) {
      Point q(m, base + tau * dir);
      return phi(q);
    };
    double tau = 0.0;
    if (family.root) {
      const auto r = family.root(u);
      if (!r) return false;
      tau = *r;
    } else {
      const double h = (family.tau_hi - family.tau_lo) / scan;
      double a = family.tau_lo;
      double fa = along(a);
      bool found = false;
      for (int k = 1; k <= scan && !found; ++k) {
        const double b = family.tau_lo + k * h;
        const double fb = along(b);
        if (fa == 0.0) {
          tau = a;
          found = true;
        } else if (fb == 0.0) {
          tau = b;
          found = true;
        } else if ((fa < 0.0) != (fb < 0.0)) {
          std::uintmax_t iters = 100;
          const auto bracket = boost::math::tools::toms748_solve(
              along, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
          tau = 0.5 * (bracket.first + bracket.second);
          found = true;
        }
        a = b;
        fa = fb;
      }
      if (!found) return false;
    }
    p = Point(m, base + tau * dir);
    const Vec g = phi.gradient(p);
    const double denom = g.dot(dir);
    if (!(std::abs(denom) > 1e-14 * g.norm())) return false;
    t.resize(d, d - 1);
    for (int j = 0; j < d - 1; ++j) {
      const Vec moving = dbase.col(j) + tau * ddir.col(j);
      const double dtau = -g.dot(moving) / denom;
      t.col(j) = moving + dtau * dir;
    }
    return true;
  });
  return patch.oriented_by(phi);
}

ScalarField gauge_ball_function(const GroupSpec& spec, const Point& center, double r) {
  const GroupSpec g = spec;
  const Point cinv = inverse(center);
  const Mat lin = left_translation_jacobian(spec, cinv);
  const double r4 = std::pow(r, 4);
  const int m = spec.m();
  ScalarField f;
  f.eval = [g, cinv, r4](const Point& p) {
    const Point q = multiply(g, cinv, p);
    const double s2 = q.first().squaredNorm();
    return s2 * s2 + q.second().squaredNorm() - r4;
  };
  f.egrad = [g, cinv, lin, m](const Point& p) {
    const Point q = multiply(g, cinv, p);
    const double s2 = q.first().squaredNorm();
    Vec dq(q.dim());
    dq.head(m) = 4.0 * s2 * q.first();
    dq.tail(q.dim() - m) = 2.0 * q.second();
    return Vec(lin.transpose() * dq);
  };
  return f;
}

SurfacePatch gauge_sphere(const GroupSpec& spec, const Point& center, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("gauge_sphere: radius must be positive");
  const int m = spec.m();
  const int d = spec.dim();
  const Point origin = identity(spec);
  LineFamily fam = star_lines(spec, origin, 2.0 * std::max(r, r * r));
  const HypersphereMap sphere(d);
  const double r4 = std::pow(r, 4);
  fam.root = [sphere, m, d, r4](std::span<const double> u) -> std::optional<double> {
    Vec w(d);
    sphere.direction(u, w);
    // same axis permutation as star_lines
    Vec dir(d);
    dir.head(d - 1) = w.tail(d - 1);
    dir[d - 1] = w[0];
    const double a = std::pow(dir.head(m).squaredNorm(), 2);
    const double b = dir.tail(d - m).squaredNorm();
    return std::sqrt(2.0 * r4 / (b + std::sqrt(b * b + 4.0 * a * r4)));
  };
  const SurfacePatch local = implicit_patch(spec, gauge_ball_function(spec, origin, r), std::move(fam));
  return local.translated(spec, center);
}

HorizontalVector horizontal_normal(const GroupSpec& spec, const Domain& dom, const Point& p, double tol) {
  const double value = dom.phi(p);
  if (!(std::abs(value) < 1e-8)) {
    throw std::invalid_argument("horizontal_normal: point is not on the boundary (|phi| = " +
                                std::to_string(std::abs(value)) + ")");
  }
  HorizontalVector g = h_gradient(spec, dom.phi, p);
  const double norm = g.norm();
  if (!(norm >= tol)) throw CharacteristicPointError("horizontal_normal: characteristic point", p);
  g.components /= -norm;
  return g;
}

double perimeter_density(const GroupSpec& spec, const SurfaceSample& s) {
  const double area = s.normal.norm();
  if (area == 0.0) return 0.0;
  return frame_pairing(spec, s.point.coords(), s.normal).norm() / area;
}

CharacteristicScan characteristic_scan(const GroupSpec& spec, const Domain& dom, const SurfacePatch& patch,
                                       int resolution, double kappa) {
  if (resolution < 1) throw std::invalid_argument("characteristic_scan: resolution must be positive");
  CharacteristicScan out;
  out.resolution = resolution;
  const Box& box = patch.params();
  const int k = box.dim();
  const Vec du = (box.hi - box.lo) / resolution;
  const double cell = du.prod();

  std::vector<int> idx(k, 0);
  std::vector<double> u(k);
  SurfaceSample s;
  std::vector<double> diam;
  double flagged_area = 0.0;
  for (;;) {
    for (int j = 0; j < k; ++j) u[j] = box.lo[j] + (idx[j] + 0.5) * du[j];
    if (patch.sample(u, s)) {
      const double area = s.normal.norm() * cell;
      out.total_area += area;
      const Vec g = dom.phi.gradient(s.point);
      const double gh = frame_pairing(spec, s.point.coords(), g).norm();
      double dsq = 0.0;
      for (int j = 0; j < k; ++j) dsq += (s.tangents.col(j) * du[j]).squaredNorm();
      const double h = std::sqrt(dsq);
      if (gh <= kappa * h * g.norm()) {
        out.points.push_back(s.point);
        diam.push_back(h);
        flagged_area += area;
      }
    }
    int j = 0;
    while (j < k && ++idx[j] == resolution) idx[j++] = 0;
    if (j == k) break;
  }
  out.flagged_fraction = out.total_area > 0.0 ? flagged_area / out.total_area : 0.0;

  // Single-linkage clusters with a link length of a few cell diameters.
  const std::size_t count = out.points.size();
  if (count == 0) return out;
  const double link = 3.0 * *std::max_element(diam.begin(), diam.end());
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      if ((out.points[a].coords() - out.points[b].coords()).norm() <= link) parent[find(a)] = find(b);
    }
  }
  std::vector<std::size_t> roots;
  for (std::size_t a = 0; a < count; ++a) {
    const std::size_t r = find(a);
    auto it = std::find(roots.begin(), roots.end(), r);
    std::size_t slot = static_cast<std::size_t>(it - roots.begin());
    if (it == roots.end()) {
      roots.push_back(r);
      CharacteristicCluster c;
      c.centroid = Point(spec.m(), spec.n());
      out.clusters.push_back(c);
    }
    out.clusters[slot].centroid.coords() += out.points[a].coords();
    ++out.clusters[slot].count;
  }
  for (auto& c : out.clusters) c.centroid.coords() /= static_cast<double>(c.count);
  for (std::size_t a = 0; a < count; ++a) {
    const std::size_t slot =
        static_cast<std::size_t>(std::find(roots.begin(), roots.end(), find(a)) - roots.begin());
    auto& c = out.clusters[slot];
    c.radius = std::max(c.radius, (out.points[a].coords() - c.centroid.coords()).norm());
  }
  return out;
}

namespace {

MeasureEstimate integrate_patch(const SurfacePatch& patch, const Window& window, const QuadratureOptions& opts,
                                const std::function<double(const SurfaceSample&)>& density) {
  return integrate_box(
      patch.params(),
      [&](std::span<const double> u) {
        thread_local SurfaceSample s;
        if (!patch.sample(u, s)) return 0.0;
        if (!s.normal.allFinite() || !s.point.is_finite()) {
          throw std::invalid_argument("surface patch produced a nonfinite point or area element");
        }
        if (window && !window(s.point)) return 0.0;
        return density(s);
      },
      opts);
}

}  // namespace

MeasureEstimate h_perimeter(const GroupSpec& spec, const SurfacePatch& patch, const Window& window,
                            const QuadratureOptions& opts) {
  return integrate_patch(patch, window, opts, [&](const SurfaceSample& s) {
    return frame_pairing(spec, s.point.coords(), s.normal).norm();
  });
}

MeasureEstimate euclidean_area(const GroupSpec&, const SurfacePatch& patch, const Window& window,
                               const QuadratureOptions& opts) {
  return integrate_patch(patch, window, opts, [](const SurfaceSample& s) { return s.normal.norm(); });
}

Side halfspace_side(const GroupSpec& spec, const HalfSpaceH& hs, const Point& q, double tol) {
  const Point rel = multiply(spec, inverse(hs.base), q);
  const double v = rel.first().dot(hs.normal);
  if (v > tol) return Side::plus;
  if (v < -tol) return Side::minus;
  return Side::on;
}

ThetaReport theta_d_report(const GroupSpec& spec) {
  const int m = spec.m();
  const int n = spec.n();
  const int Q = spec.homogeneous_dimension();
  const double eps = spec.eps();
  const double sphere_q = unit_ball_volume(Q - 1);
  ThetaReport out;
  out.stated = unit_ball_volume(m - 1) * unit_ball_volume(n) * std::pow(eps, n) / sphere_q;
  out.plane = unit_ball_volume(m - 1) * unit_ball_volume(n) * std::pow(eps, -2.0 * n) / sphere_q;

  // {x_1 = 0} cap B(0,1) = B^{m-1}(1) x B^n(1/eps^2) in the remaining coordinates.
  const GroupSpec slice(std::max(m - 1, 1), n, {}, eps);
  const Region chart = Region::cylinder(slice, identity(slice), 1.0, 1.0 / (eps * eps));
  QuadratureOptions opts;
  opts.max_order = 64;
  if (m - 1 >= 1) {
    out.quadrature = integrate_region(chart, [](const Point&) { return 1.0; }, opts).value / sphere_q;
    const GroupSpec g = spec;
    out.h_perimeter =
        integrate_region(chart,
                         [&](const Point& q) {
                           Vec coords(m + n);
                           coords[0] = 0.0;
                           coords.tail(m + n - 1) = q.coords();
                           return frame_pairing(g, coords, Vec::Unit(m + n, 0)).norm();
                         },
                         opts)
            .value /
        sphere_q;
  }
  return out;
}

}  // namespace carnot
