#pragma once

#include "carnot/group.hpp"

#include <functional>
#include <optional>
#include <string>

namespace carnot {

/// Function on the group with a Euclidean gradient. Without `egrad` the gradient
/// falls back to central differences with step fd_step * (1 + |p|).
struct ScalarField {
  std::function<double(const Point&)> eval;
  std::function<Vec(const Point&)> egrad;
  double fd_step = 1e-5;

  double operator()(const Point& p) const { return eval(p); }
  Vec gradient(const Point& p) const;
  bool has_analytic_gradient() const { return static_cast<bool>(egrad); }
};

Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& p, double h);

/// Horizontal section: components with respect to X_1..X_m.
struct HorizontalSection {
  std::function<Vec(const Point&)> eval;
  /// Optional Euclidean Jacobian of the components (m x (m+n)).
  std::function<Mat(const Point&)> jacobian;
  /// Optional coordinate box outside of which the section vanishes.
  std::optional<std::pair<Vec, Vec>> support;
};

/// (X_1 f(p), ..., X_m f(p)).
HorizontalVector h_gradient(const GroupSpec& spec, const ScalarField& f, const Point& p);

/// sum_i X_i phi_i(p), from the analytic Jacobian when the section has one and by
/// central differences of step h otherwise. Throws for h <= 0.
double h_divergence(const GroupSpec& spec, const HorizontalSection& phi, const Point& p, double h = 1e-5);

/// Horizontal gradient through the layer decomposition D_xi f + 1/2 J(eta) xi,
/// eta being the second-layer part of the Euclidean gradient.
Vec h_gradient_decomposed(const GroupSpec& spec, const Vec& egrad, const Point& p);

/// -J(e_n) xi / max(s, delta), the divergence-free test field used for the
/// partial-symmetry estimate.
class SymmetryField {
 public:
  SymmetryField(const GroupSpec& spec, double delta);

  HorizontalVector operator()(const Point& p) const;
  HorizontalSection section() const;

  /// |V| <= 1 is guaranteed only on Heisenberg-type groups.
  bool bound_guaranteed() const { return htype_; }
  const std::string& warning() const { return warning_; }
  double delta() const { return delta_; }

 private:
  GroupSpec spec_;
  double delta_;
  bool htype_;
  std::string warning_;
};

}  // namespace carnot
