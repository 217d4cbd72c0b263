#pragma once

#include "carnot/geometry.hpp"
#include "carnot/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

enum class VariationMethod { smooth_integral, sup_dictionary, coarea_slices };

std::string to_string(VariationMethod method);

/// One dictionary term: coefficient * monomial(z) * bump(x) in component `component`,
/// z being the coordinates rescaled to [-1, 1] over the box.
struct FieldTerm {
  int component = 0;
  int monomial = 0;
  double coef = 1.0;
};

struct FieldWitness {
  std::vector<FieldTerm> terms;
  double width = 0.0;  ///< plateau transition width as a fraction of each box edge
  std::string describe() const;
};

struct VariationReport {
  double value = 0.0;
  double error = 0.0;
  VariationMethod method = VariationMethod::smooth_integral;
  std::optional<FieldWitness> witness;
  MeasureEstimate estimate;
};

/// int_Omega |grad_H u| over a volume chart. Needs a gradient (analytic or FD).
VariationReport var_h_smooth(const GroupSpec& spec, const ScalarField& u, const Region& omega,
                             const QuadratureOptions& opts = {});

struct SupOptions {
  /// Plateau transition widths tried, as fractions of each box edge.
  std::vector<double> widths = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  int ascent_rounds = 3;
  /// Extra cell edges per axis (e.g. where u jumps); box ends are always edges.
  std::vector<std::vector<double>> breaks;
  int coarse_order = 4;
  int fine_order = 16;
};

/// Lower bound sup int u div_H phi over a dictionary of fields supported in the
/// box: monomials of degree <= 2 times a tensor-product plateau bump, divided by
/// a bound on their sup norm so that |phi| <= 1, refined by coordinate ascent.
VariationReport var_h_sup(const GroupSpec& spec, const std::function<double(const Point&)>& u, const Box& omega,
                          const SupOptions& opts = {});

/// Dispatches on the method: the smooth path integrates over the box, the sup path
/// uses the dictionary. Throws if the box is not bounded.
VariationReport var_h(const GroupSpec& spec, const ScalarField& u, const Box& omega, VariationMethod method,
                      const SupOptions& sup = {}, const QuadratureOptions& quad = {});

/// Number of dictionary monomials in d variables (degree <= 2).
int monomial_count(int d);
/// Value and gradient (w.r.t. z) of monomial k at z.
double monomial(int k, const Vec& z, Vec* grad = nullptr);

/// Level set {u = t} cap Omega as patches with optional windows.
struct LevelPiece {
  SurfacePatch patch;
  Window window;
};
using LevelSets = std::function<std::vector<LevelPiece>(double t)>;

/// {s = inverse(t)} x second box; for u = f(s) on a first-layer cylinder.
LevelSets cylinder_level_sets(const GroupSpec& spec, std::function<double(double)> inverse, Box second);
/// Gauge spheres rho(center^{-1} p) = inverse(t); for u = f(rho).
LevelSets gauge_level_sets(const GroupSpec& spec, const Point& center, std::function<double(double)> inverse);
/// {u = t} through a line family, restricted to a window.
LevelSets implicit_level_sets(const GroupSpec& spec, const ScalarField& u, LineFamily family, Window window = {});

struct CoareaReport {
  double lhs = 0.0;          ///< Var_H(u; Omega) by the smooth integral
  double rhs = 0.0;          ///< int |dA_t|_H(Omega) dt, Richardson-refined
  double rhs_coarse = 0.0;   ///< midpoint rule on `slices`
  double gap = 0.0;          ///< |lhs - rhs| / max(|lhs|, tiny); 0 when both vanish
  MeasureEstimate lhs_estimate;
};

/// Both sides of the coarea formula. The right side uses the midpoint rule on
/// `slices` and 2*slices uniform t-slices of [t_lo, t_hi], combined by one
/// Richardson step.
CoareaReport coarea_check(const GroupSpec& spec, const ScalarField& u, const Region& omega, const LevelSets& levels,
                          double t_lo, double t_hi, int slices = 64, const QuadratureOptions& opts = {});

struct RatioReport {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool defined = true;
  std::string note;
};

/// ||u - mean||_{Q/(Q-1)} / Var_H(u; B_rho(center, r)).
RatioReport poincare_report(const GroupSpec& spec, const ScalarField& u, const Point& center, double r,
                            const QuadratureOptions& opts = {});

/// min(|E cap B|, |E^c cap B|)^{(Q-1)/Q} / |dE|_H(B) with B = B_rho(center, r); the
/// volume split is Monte Carlo, the perimeter is quadrature of `boundary` in B.
RatioReport isoperimetric_report(const GroupSpec& spec, const std::function<bool(const Point&)>& E,
                                 const SurfacePatch& boundary, const Point& center, double r,
                                 std::size_t samples = 1000000, std::uint64_t seed = 1,
                                 const QuadratureOptions& opts = {});

struct GaussGreenReport {
  std::vector<int> orders;
  std::vector<double> volume;
  std::vector<double> surface;   ///< int <nu_E, phi> d|dE|_H, nu_E inward
  std::vector<double> residual;  ///< |volume + surface|
  double rate = 0.0;             ///< fitted -d log residual / d log order above the round-off floor
};

/// Residual of int_E div_H phi + int <nu_E, phi> d|dE|_H at each order. `volume`
/// must chart E cap supp(phi); `boundary` must cover dE cap supp(phi).
GaussGreenReport gauss_green_residual(const GroupSpec& spec, const Region& volume, const SurfacePatch& boundary,
                                      const HorizontalSection& phi, const std::vector<int>& orders = {4, 8, 16, 32, 64});

/// C-infinity bump prod_k exp(1 - 1/(1 - z_k^2)) on a box, z the rescaled coordinates;
/// horizontal section (bump, 0, ..., 0) in component `component`.
HorizontalSection bump_section(const GroupSpec& spec, const Box& support, int component = 0);

}  // namespace carnot
