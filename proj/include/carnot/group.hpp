#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <string>
#include <vector>

namespace carnot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One structure constant b_{ij}^l = <[e_i, e_j], eps_l>, zero-based indices.
struct StructureConstant {
  int i;
  int j;
  int l;
  double value;
};

/// Step-2 stratified Lie algebra V1 (+) V2 with dim V1 = m, dim V2 = n, together
/// with the metric parameter used by the box distance. Immutable once built.
class GroupSpec {
 public:
  /// Takes the full list of nonzero constants as given; no antisymmetrization.
  /// Throws std::invalid_argument on nonpositive dimensions or out-of-range indices.
  GroupSpec(int m, int n, std::vector<StructureConstant> constants, double eps = 0.5);

  /// H^k: m = 2k, n = 1, b_{2a-1,2a}^1 = 1.
  static GroupSpec heisenberg(int k = 1, double eps = 0.5);
  /// Quaternionic Heisenberg-type group: m = 4, n = 3, J(eps_l) = left
  /// multiplication by i, j, k.
  static GroupSpec quaternionic(double eps = 0.5);
  /// Free step-2 algebra on k generators: one second-layer direction per pair i<j.
  static GroupSpec free_step2(int k, double eps = 0.5);

  int m() const { return m_; }
  int n() const { return n_; }
  int dim() const { return m_ + n_; }
  int homogeneous_dimension() const { return m_ + 2 * n_; }
  double eps() const { return eps_; }

  double b(int i, int j, int l) const { return b_[index(i, j, l)]; }
  /// Matrix B^l with entries b_{ij}^l.
  Mat bracket_matrix(int l) const;
  std::vector<StructureConstant> nonzero_constants() const;

  GroupSpec with_eps(double eps) const;

 private:
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(l) * m_ + i) * m_ + j;
  }

  int m_;
  int n_;
  double eps_;
  std::vector<double> b_;
};

struct ValidationReport {
  std::vector<std::string> failures;
  int generation_rank = 0;

  bool ok() const { return failures.empty(); }
};

ValidationReport validate_spec(const GroupSpec& spec);

/// Group element in exponential coordinates: (first layer, second layer).
class Point {
 public:
  Point() = default;
  Point(int m, int n) : coords_(Vec::Zero(m + n)), m_(m) {}
  Point(int m, Vec coords) : coords_(std::move(coords)), m_(m) {}
  Point(const GroupSpec& spec, std::initializer_list<double> values);

  int m() const { return m_; }
  int n() const { return static_cast<int>(coords_.size()) - m_; }
  int dim() const { return static_cast<int>(coords_.size()); }

  const Vec& coords() const { return coords_; }
  Vec& coords() { return coords_; }
  auto first() const { return coords_.head(m_); }
  auto second() const { return coords_.tail(coords_.size() - m_); }

  double operator[](int k) const { return coords_[k]; }
  double& operator[](int k) { return coords_[k]; }

  bool is_finite() const { return coords_.allFinite(); }

 private:
  Vec coords_;
  int m_ = 0;
};

/// A vector of the horizontal fibre at `base`, in coordinates w.r.t. X_1(base)..X_m(base).
struct HorizontalVector {
  Point base;
  Vec components;

  double norm() const { return components.norm(); }
};

/// p.q = p + q + 1/2 [p, q], the bracket living in the second layer only.
Point multiply(const GroupSpec& spec, const Point& p, const Point& q);
Point inverse(const Point& p);
Point identity(const GroupSpec& spec);

/// delta_r(p) = (r p_first, r^2 p_second). Throws std::invalid_argument for r <= 0.
Point dilate(const GroupSpec& spec, double r, const Point& p);
/// Jacobian determinant of delta_r, r^Q.
double dilation_jacobian(const GroupSpec& spec, double r);

/// Left translation q -> z.q is affine; this is its (constant) linear part.
Mat left_translation_jacobian(const GroupSpec& spec, const Point& z);
Mat dilation_matrix(const GroupSpec& spec, double r);

/// Row i holds X_i(p) in Euclidean coordinates of R^{m+n}.
Mat frame(const GroupSpec& spec, const Point& p);
/// <X_i(p), v> for all i without forming the frame.
Vec frame_pairing(const GroupSpec& spec, const Vec& coords, const Vec& v);

/// (J(eta) xi)_j = sum_{i,l} eta_l b_{ij}^l xi_i.
Vec j_apply(const GroupSpec& spec, const Vec& eta, const Vec& xi);
Mat j_matrix(const GroupSpec& spec, const Vec& eta);

struct HeisenbergTypeCheck {
  bool is_htype = false;
  double residual = 0.0;
};

/// Checks J(e_l)^T J(e_k) + J(e_k)^T J(e_l) = 2 delta_{lk} I for all basis pairs.
HeisenbergTypeCheck is_heisenberg_type(const GroupSpec& spec, double tol = 1e-12);

}  // namespace carnot
