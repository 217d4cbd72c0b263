#pragma once

#include "carnot/geometry.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace carnot {

/// A piece of a boundary: a patch restricted to an optional window.
struct BoundaryPiece {
  SurfacePatch patch;
  Window window;
};

struct AdmissibilityRatio {
  double ratio = 0.0;
  MeasureEstimate numerator;    ///< |dOmega|_H over the part of dE on dOmega
  MeasureEstimate denominator;  ///< |dE|_H(Omega)
  bool infinite = false;
};

/// |dOmega|_H(dE cap dOmega) / |dE|_H(Omega). An empty `on_boundary` gives 0; a
/// vanishing denominator gives +inf with `infinite` set.
AdmissibilityRatio admissibility_ratio(const GroupSpec& spec, const std::vector<BoundaryPiece>& on_boundary,
                                       const std::vector<BoundaryPiece>& interior,
                                       const QuadratureOptions& opts = {});

/// The C^{1,alpha} example in H^1: Omega = {t < 1 - s^{2-deficit}} near the pole
/// and A_N = Omega cap {t > 1 - 1/N}.
struct CounterexampleRow {
  double deficit = 0.0;
  double N = 0.0;
  MeasureEstimate perim_top;   ///< |dA_N|_H(Omega), the disk at t = 1 - 1/N
  MeasureEstimate perim_side;  ///< |dOmega|_H(A_N), the graph over the same disk
  double ratio = 0.0;          ///< perim_side / perim_top
  double F = 0.0;              ///< from the one-dimensional reduced integral
  double closed_form = 0.0;    ///< (pi/3) N^{-3/(2-deficit)}
  double rel_err = 0.0;        ///< |perim_top - closed_form| / closed_form
};

struct CounterexampleSweep {
  std::vector<CounterexampleRow> rows;
  std::vector<double> deficits;
  /// Least-squares slope of log F against log N, per deficit.
  std::vector<double> slopes;
  /// F(1/N) N^{-deficit/(2-deficit)} at the largest N, per deficit.
  std::vector<double> prefactors;
};

/// F(x) = int_0^1 u sqrt((2-e)^2 x^{-2e/(2-e)} u^{2-2e} + u^2/4) du, e = deficit,
/// by graded Gauss-Legendre. Throws unless deficit is in [0, 1) and x in (0, 1].
double counterexample_F(double deficit, double x);

/// Both perimeters by surface quadrature and F by the reduced integral, for each
/// (deficit, N) cell. Throws unless every deficit is in [0, 1) and every N >= 1.
CounterexampleSweep counterexample_sweep(const std::vector<double>& deficits, const std::vector<double>& Ns,
                                         const QuadratureOptions& opts = {});

/// Boundary near a characteristic point moved to the identity, written as
/// t_n = -g(s, y_1..y_{n-1}); only the partial derivatives are needed.
struct GraphProfile {
  std::function<double(double s, const Vec& y)> dg_ds;
  /// Gradient in y_1..y_{n-1}; may be empty when n = 1.
  std::function<Vec(double s, const Vec& y)> dg_dy;
};

struct ProbeRegion {
  double s_lo = 1e-4;
  double s_hi = 0.5;
  int s_count = 40;  ///< log-spaced
  /// Box of y_1..y_{n-1}; empty when n = 1.
  Box y_box;
  int y_count = 5;  ///< per axis
};

struct SymmetryBound {
  double M = 0.0;  ///< sup |dg/ds| / s, +inf when the quotient diverges as s -> 0
  double L = 1.0;  ///< sup 1 + |grad_y g|^2
  double bound = 0.0;        ///< sqrt(M^2 + L/4)
  double tight_bound = 0.0;  ///< 2 * bound
  double sup_quotient = 0.0;    ///< largest quotient over the probes
  double quotient_slope = 0.0;  ///< d log quotient / d log s over the smaller half of the s probes
  bool satisfied = true;
  std::string verdict;
  std::string warning;
};

/// Constants of the partial-symmetry estimate from a graph profile. Requires a
/// group of Heisenberg type; on other groups the result carries a warning.
SymmetryBound partial_symmetry_bound(const GroupSpec& spec, const GraphProfile& profile,
                                     const ProbeRegion& probes = {});

/// Graph profile of dom near the characteristic point P: after translating P to
/// the identity the boundary is solved for t_n along vertical lines in
/// [-reach, reach], and derivatives are central differences. dg/ds is the
/// largest radial derivative over `directions` first-layer directions.
GraphProfile profile_from_domain(const GroupSpec& spec, const Domain& dom, const Point& P, double reach = 0.5,
                                 int directions = 8);

struct NoncharacteristicBound {
  double K = 0.0;
  double ratio_bound = std::numeric_limits<double>::infinity();  ///< 1 / K
  Point argmin;   ///< where the infimum over the patch is attained
  Mat rotation;   ///< the chosen orthonormal horizontal frame (rows)
};

/// K = max over sampled rotations R of min over patch samples of max_i |(R nu)_i|,
/// nu the horizontal normal of dom. Patch samples are `resolution` cell centers
/// per parameter axis. Throws CharacteristicPointError at characteristic samples.
NoncharacteristicBound noncharacteristic_bound(const GroupSpec& spec, const Domain& dom, const SurfacePatch& patch,
                                               int resolution = 24, int rotations = 64, std::uint64_t seed = 1);

}  // namespace carnot
