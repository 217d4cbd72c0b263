#pragma once

#include "carnot/group.hpp"
#include "carnot/measure.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace carnot {

/// Axis-aligned box [lo, hi] in some coordinate space.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const;
  double volume() const;
};

/// Gauss-Legendre rule on [-1, 1]. Rules are computed once and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

struct QuadratureOptions {
  int min_order = 8;
  int max_order = 1024;
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  /// Composite rule: each box axis is split into this many equal panels.
  int panels = 1;
  /// Refinement stops before a level would exceed this many integrand calls.
  std::size_t max_points = std::size_t{1} << 22;
  /// When positive, evaluate at exactly this order (no refinement).
  int fixed_order = 0;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Tensor-product composite Gauss-Legendre sum over a box.
double tensor_gauss(const Box& box, int order, int panels, const Integrand& f);

/// Composite rule over the cells of a tensor grid with the given edges per axis.
double tensor_gauss_edges(const std::vector<std::vector<double>>& edges, int order, const Integrand& f);
std::vector<std::vector<double>> uniform_edges(const Box& box, int panels);
/// Order doubling over a tensor grid of cells; `panels` is ignored.
MeasureEstimate integrate_edges(const std::vector<std::vector<double>>& edges, const Integrand& f,
                                const QuadratureOptions& opts = {});

/// Order doubling from min_order until |I_2n - I_n| <= max(abs_tol, rel_tol |I_2n|).
MeasureEstimate integrate_box(const Box& box, const Integrand& f, const QuadratureOptions& opts = {});

MeasureEstimate integrate_1d(double a, double b, const std::function<double(double)>& f,
                             const QuadratureOptions& opts = {});

/// Hyperspherical coordinates on S^{k-1}: angles a_1..a_{k-2} in (0, pi), a_{k-1} in (0, 2 pi).
class HypersphereMap {
 public:
  explicit HypersphereMap(int k);

  int ambient_dim() const { return k_; }
  int angle_count() const { return k_ - 1; }
  Box angle_box() const;

  /// Unit vector for the given angles.
  void direction(std::span<const double> angles, Eigen::Ref<Vec> out) const;
  /// Column j: d direction / d angle_j.
  void direction_jacobian(std::span<const double> angles, Eigen::Ref<Mat> out) const;
  /// Surface element of S^{k-1} in these angles.
  double angular_jacobian(std::span<const double> angles) const;

 private:
  int k_;
};

/// Full-dimensional coordinate chart of a region of the group. `map` writes the
/// image point and returns the Jacobian determinant, or 0 where the parameter
/// lies outside the region.
class Region {
 public:
  using Map = std::function<double(std::span<const double> u, Point& out)>;

  Region(int m, int n, Box params, Map map) : m_(m), n_(n), params_(std::move(params)), map_(std::move(map)) {}

  /// Coordinate box; `membership` multiplies the integrand when given.
  static Region box(const GroupSpec& spec, Box ambient, std::function<bool(const Point&)> membership = {});
  /// center . (B^m(first_radius) x B^n(second_radius)); a box-d ball when
  /// second_radius = r^2/eps^2.
  static Region cylinder(const GroupSpec& spec, const Point& center, double first_radius, double second_radius);
  /// First-layer ball of radius `first_radius` times a coordinate box in the second layer.
  static Region first_layer_cylinder(const GroupSpec& spec, const Point& center, double first_radius,
                                     Box second_box);
  static Region box_d_ball(const GroupSpec& spec, const Point& center, double r);
  /// Gauge ball center . B_rho(0, r), star-shaped chart with closed-form radius.
  static Region gauge_ball(const GroupSpec& spec, const Point& center, double r);
  /// {(u, y) : u in base, lower < y < upper(u)} where y is the last coordinate.
  static Region subgraph(const GroupSpec& spec, Box base, double lower,
                         std::function<double(std::span<const double>)> upper);

  int m() const { return m_; }
  int n() const { return n_; }
  const Box& params() const { return params_; }
  double map(std::span<const double> u, Point& out) const { return map_(u, out); }

  /// Image under left translation by z (Jacobian unchanged).
  Region translated(const GroupSpec& spec, const Point& z) const;
  /// Image under delta_r (Jacobian scaled by r^Q).
  Region dilated(const GroupSpec& spec, double r) const;

 private:
  int m_;
  int n_;
  Box params_;
  Map map_;
};

MeasureEstimate integrate_region(const Region& region, const std::function<double(const Point&)>& f,
                                 const QuadratureOptions& opts = {});

}  // namespace carnot
