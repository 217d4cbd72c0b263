#pragma once

#include "carnot/group.hpp"
#include "carnot/hcalc.hpp"
#include "carnot/measure.hpp"
#include "carnot/quadrature.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

/// Omega = {phi < 0}, with a coordinate box containing the region of interest.
struct Domain {
  ScalarField phi;
  Box bbox;
  std::string name;

  bool contains(const Point& p) const { return phi(p) < 0.0; }
};

class CharacteristicPointError : public std::runtime_error {
 public:
  CharacteristicPointError(const std::string& what, Point where)
      : std::runtime_error(what), where_(std::move(where)) {}
  const Point& where() const { return where_; }

 private:
  Point where_;
};

struct SurfaceSample {
  Point point;
  Mat tangents;  ///< (m+n) x (m+n-1), columns d point / d u_j
  Vec normal;    ///< oriented generalized cross product; |normal| is the area element
};

/// Generalized cross product of the columns: N . v = det[T | v].
Vec cross_normal(const Mat& tangents);

/// Parameterized hypersurface piece. `map` writes the point and its tangents and
/// returns false where the parameter does not hit the surface.
class SurfacePatch {
 public:
  using Map = std::function<bool(std::span<const double> u, Point& p, Mat& tangents)>;

  SurfacePatch(int m, int n, Box params, Map map, int orientation = 1)
      : m_(m), n_(n), params_(std::move(params)), map_(std::move(map)), orientation_(orientation) {}

  int m() const { return m_; }
  int n() const { return n_; }
  const Box& params() const { return params_; }
  int orientation() const { return orientation_; }

  bool sample(std::span<const double> u, SurfaceSample& out) const;

  SurfacePatch flipped() const;
  /// Orientation chosen so that the normal points toward increasing phi
  /// (outward for {phi < 0}).
  SurfacePatch oriented_by(const ScalarField& phi) const;
  SurfacePatch with_params(Box params) const;

  /// Image under left translation by z.
  SurfacePatch translated(const GroupSpec& spec, const Point& z) const;
  /// Image under delta_r.
  SurfacePatch dilated(const GroupSpec& spec, double r) const;

 private:
  int m_;
  int n_;
  Box params_;
  Map map_;
  int orientation_;
};

/// {x_axis = value}, parameterized by the remaining coordinates in order.
/// Normal along +e_axis.
SurfacePatch coordinate_plane(const GroupSpec& spec, int axis, double value, Box other);

/// Graph t = g(s) over the first-layer annulus r_lo <= s <= r_hi (n = 1 only).
/// The radius is r_lo + (r_hi - r_lo) v^grade for v in (0,1); normal along +t.
SurfacePatch radial_graph(const GroupSpec& spec, std::function<double(double)> g,
                          std::function<double(double)> dg, double r_lo, double r_hi, int grade = 1);

/// {t = height, s < radius} (n = 1 only).
SurfacePatch horizontal_disk(const GroupSpec& spec, double height, double radius, int grade = 1);

/// {s = radius} x second-layer box; normal pointing away from the axis.
SurfacePatch vertical_cylinder(const GroupSpec& spec, double radius, Box second);

/// Family of lines base(u) + tau dir(u), tau in [tau_lo, tau_hi], used to
/// parameterize {phi = 0} implicitly.
struct LineFamily {
  Box params;
  double tau_lo = 0.0;
  double tau_hi = 1.0;
  /// Writes base, its Jacobian, direction and its Jacobian (columns per parameter).
  std::function<void(std::span<const double> u, Vec& base, Mat& dbase, Vec& dir, Mat& ddir)> lines;
  /// Optional closed-form crossing; returns nullopt where the line misses.
  std::function<std::optional<double>(std::span<const double> u)> root;
};

/// Lines parallel to e_axis over a box of the remaining coordinates.
LineFamily graph_lines(const GroupSpec& spec, int axis, Box other, double lo, double hi);
/// Vertical lines over the first-layer disk s < radius, polar parameters with
/// graded radius (n = 1 only).
LineFamily polar_lines(const GroupSpec& spec, double radius, double lo, double hi, int grade = 1);
/// Rays from `center` (Euclidean directions on S^{m+n-1}).
LineFamily star_lines(const GroupSpec& spec, const Point& center, double rmax);

/// {phi = 0} along a line family; the first sign change of phi along each line
/// (scanning `scan` subintervals) is refined by TOMS 748. Tangents come from
/// implicit differentiation. Oriented outward of {phi < 0}.
SurfacePatch implicit_patch(const GroupSpec& spec, const ScalarField& phi, LineFamily family, int scan = 8);

/// Gauge sphere {rho(center^{-1} p) = r}, closed-form radius along Euclidean rays.
SurfacePatch gauge_sphere(const GroupSpec& spec, const Point& center, double r);

/// Defining function rho(center^{-1} p)^4 - r^4 with analytic gradient.
ScalarField gauge_ball_function(const GroupSpec& spec, const Point& center, double r);

/// Inward horizontal normal -grad_H phi / |grad_H phi|. Requires |phi(p)| < 1e-8;
/// throws CharacteristicPointError when |grad_H phi| < tol.
HorizontalVector horizontal_normal(const GroupSpec& spec, const Domain& dom, const Point& p,
                                   double tol = 1e-10);

/// (sum_i <X_i, n>^2)^{1/2} at a surface sample, n the unit Euclidean normal.
double perimeter_density(const GroupSpec& spec, const SurfaceSample& s);

struct CharacteristicCluster {
  Point centroid;
  std::size_t count = 0;
  double radius = 0.0;  ///< largest Euclidean distance from the centroid
};

struct CharacteristicScan {
  int resolution = 0;
  std::vector<Point> points;
  std::vector<CharacteristicCluster> clusters;
  double flagged_fraction = 0.0;  ///< surface-measure-weighted
  double total_area = 0.0;
};

/// Cell-centered grid of `resolution` cells per parameter axis. A cell is flagged
/// when |grad_H phi| / |grad phi| <= kappa * (Euclidean diameter of the cell image).
CharacteristicScan characteristic_scan(const GroupSpec& spec, const Domain& dom, const SurfacePatch& patch,
                                       int resolution, double kappa = 2.0);

using Window = std::function<bool(const Point&)>;

/// |dE|_H(window) = int (sum_i <X_i, N>^2)^{1/2} du over the patch.
MeasureEstimate h_perimeter(const GroupSpec& spec, const SurfacePatch& patch, const Window& window = {},
                            const QuadratureOptions& opts = {});

/// Euclidean area of the patch inside the window.
MeasureEstimate euclidean_area(const GroupSpec& spec, const SurfacePatch& patch, const Window& window = {},
                               const QuadratureOptions& opts = {});

struct HalfSpaceH {
  Point base;
  Vec normal;
};

enum class Side { plus, minus, on };

/// Sign of <pi(base^{-1} q), normal>; |value| <= tol counts as on.
Side halfspace_side(const GroupSpec& spec, const HalfSpaceH& hs, const Point& q, double tol = 1e-12);

struct ThetaReport {
  double stated = 0.0;     ///< omega_{m-1} omega_n eps^n / omega_{Q-1}
  double plane = 0.0;      ///< H^{m+n-1}({x_1 = 0} cap B(0,1)) / omega_{Q-1}, closed form
  double quadrature = 0.0; ///< same area by quadrature of the plane patch
  double h_perimeter = 0.0;  ///< |d{x_1 < 0}|_H(B(0,1)) / omega_{Q-1}
};

/// The density constant of perimeter against the spherical measure, by its
/// stated closed form and by direct computation on the vertical plane.
ThetaReport theta_d_report(const GroupSpec& spec);

}  // namespace carnot
