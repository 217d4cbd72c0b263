#include "carnot/hcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carnot {

Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& p, double h) {
  const double step = h * (1.0 + p.coords().norm());
  Vec g(p.dim());
  Point q = p;
  for (int k = 0; k < p.dim(); ++k) {
    const double x = p[k];
    q[k] = x + step;
    const double fp = f(q);
    q[k] = x - step;
    const double fm = f(q);
    q[k] = x;
    g[k] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Vec ScalarField::gradient(const Point& p) const {
  if (egrad) return egrad(p);
  return fd_gradient(eval, p, fd_step);
}

HorizontalVector h_gradient(const GroupSpec& spec, const ScalarField& f, const Point& p) {
  return {p, frame_pairing(spec, p.coords(), f.gradient(p))};
}

double h_divergence(const GroupSpec& spec, const HorizontalSection& phi, const Point& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h_divergence: step must be positive");
  const int m = spec.m();
  const int d = spec.dim();
  // Jacobian of the components, one column per coordinate.
  Mat jac(m, d);
  Point q = p;
  if (phi.jacobian) jac = phi.jacobian(p);
  for (int k = 0; k < d && !phi.jacobian; ++k) {
    const double x = p[k];
    q[k] = x + h;
    const Vec fp = phi.eval(q);
    q[k] = x - h;
    const Vec fm = phi.eval(q);
    q[k] = x;
    jac.col(k) = (fp - fm) / (2.0 * h);
  }
  const Mat rows = frame(spec, p);
  double div = 0.0;
  for (int i = 0; i < m; ++i) div += rows.row(i).dot(jac.row(i));
  return div;
}

Vec h_gradient_decomposed(const GroupSpec& spec, const Vec& egrad, const Point& p) {
  const int m = spec.m();
  const Vec xi = p.first();
  const Vec eta = egrad.tail(spec.n());
  return egrad.head(m) + 0.5 * j_apply(spec, eta, xi);
}

SymmetryField::SymmetryField(const GroupSpec& spec, double delta)
    : spec_(spec), delta_(delta), htype_(is_heisenberg_type(spec).is_htype) {
  if (!(delta > 0.0)) throw std::invalid_argument("SymmetryField: delta must be positive");
  if (!htype_) warning_ = "group is not of Heisenberg type; |V| <= 1 is not guaranteed";
}

HorizontalVector SymmetryField::operator()(const Point& p) const {
  const Vec xi = p.first();
  const Vec eta = Vec::Unit(spec_.n(), spec_.n() - 1);
  const double s = xi.norm();
  return {p, -j_apply(spec_, eta, xi) / std::max(s, delta_)};
}

HorizontalSection SymmetryField::section() const {
  const SymmetryField self = *this;
  return {[self](const Point& p) { return self(p).components; }, {}, std::nullopt};
}

}  // namespace carnot
