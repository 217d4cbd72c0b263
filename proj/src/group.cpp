#include "carnot/group.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carnot {

GroupSpec::GroupSpec(int m, int n, std::vector<StructureConstant> constants, double eps)
    : m_(m), n_(n), eps_(eps) {
  if (m <= 0 || n <= 0) {
    throw std::invalid_argument("GroupSpec: layer dimensions must be positive");
  }
  b_.assign(static_cast<std::size_t>(m) * m * n, 0.0);
  for (const auto& c : constants) {
    if (c.i < 0 || c.i >= m || c.j < 0 || c.j >= m || c.l < 0 || c.l >= n) {
      std::ostringstream msg;
      msg << "GroupSpec: structure constant index (" << c.i + 1 << ", " << c.j + 1 << ", "
          << c.l + 1 << ") out of range";
      throw std::invalid_argument(msg.str());
    }
    b_[index(c.i, c.j, c.l)] = c.value;
  }
}

GroupSpec GroupSpec::heisenberg(int k, double eps) {
  std::vector<StructureConstant> c;
  for (int a = 0; a < k; ++a) {
    c.push_back({2 * a, 2 * a + 1, 0, 1.0});
    c.push_back({2 * a + 1, 2 * a, 0, -1.0});
  }
  return GroupSpec(2 * k, 1, std::move(c), eps);
}

GroupSpec GroupSpec::quaternionic(double eps) {
  // Left multiplication by i, j, k on quaternions a + bi + cj + dk.
  const double units[3][4][4] = {
      {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}},
      {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}},
      {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}},
  };
  std::vector<StructureConstant> c;
  for (int l = 0; l < 3; ++l) {
    for (int row = 0; row < 4; ++row) {
      for (int col = 0; col < 4; ++col) {
        // J(eps_l)_{ji} = b_{ij}^l
        if (units[l][row][col] != 0.0) c.push_back({col, row, l, units[l][row][col]});
      }
    }
  }
  return GroupSpec(4, 3, std::move(c), eps);
}

GroupSpec GroupSpec::free_step2(int k, double eps) {
  if (k < 2) throw std::invalid_argument("free_step2: need at least 2 generators");
  std::vector<StructureConstant> c;
  int l = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j, ++l) {
      c.push_back({i, j, l, 1.0});
      c.push_back({j, i, l, -1.0});
    }
  }
  return GroupSpec(k, k * (k - 1) / 2, std::move(c), eps);
}

Mat GroupSpec::bracket_matrix(int l) const {
  Mat out(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) out(i, j) = b(i, j, l);
  }
  return out;
}

std::vector<StructureConstant> GroupSpec::nonzero_constants() const {
  std::vector<StructureConstant> out;
  for (int l = 0; l < n_; ++l) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (b(i, j, l) != 0.0) out.push_back({i, j, l, b(i, j, l)});
      }
    }
  }
  return out;
}

GroupSpec GroupSpec::with_eps(double eps) const {
  GroupSpec out = *this;
  out.eps_ = eps;
  return out;
}

ValidationReport validate_spec(const GroupSpec& spec) {
  ValidationReport report;
  const int m = spec.m();
  const int n = spec.n();

  if (!(spec.eps() > 0.0 && spec.eps() < 1.0)) {
    std::ostringstream msg;
    msg << "eps out of (0,1): " << spec.eps();
    report.failures.push_back(msg.str());
  }

  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double a = spec.b(i, j, l);
        const double c = spec.b(j, i, l);
        if (!std::isfinite(a) || a != -c) {
          std::ostringstream msg;
          msg << "antisymmetry: b(" << i + 1 << "," << j + 1 << "," << l + 1 << ") = " << a
              << " but b(" << j + 1 << "," << i + 1 << "," << l + 1 << ") = " << c;
          report.failures.push_back(msg.str());
        }
      }
    }
  }

  // Rows: second-layer directions; columns: pairs i<j.
  const int pairs = m * (m - 1) / 2;
  if (pairs == 0) {
    report.generation_rank = 0;
  } else {
    Mat gen(n, pairs);
    for (int l = 0; l < n; ++l) {
      int col = 0;
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) gen(l, col++) = spec.b(i, j, l);
      }
    }
    Eigen::FullPivLU<Mat> lu(gen);
    lu.setThreshold(1e-12);
    report.generation_rank = static_cast<int>(lu.rank());
  }
  if (report.generation_rank < n) {
    std::ostringstream msg;
    msg << "generation: rank " << report.generation_rank << " < n = " << n;
    report.failures.push_back(msg.str());
  }
  return report;
}

Point::Point(const GroupSpec& spec, std::initializer_list<double> values)
    : coords_(spec.dim()), m_(spec.m()) {
  if (static_cast<int>(values.size()) != spec.dim()) {
    throw std::invalid_argument("Point: coordinate count does not match m + n");
  }
  int k = 0;
  for (double v : values) coords_[k++] = v;
}

namespace {

void check_dims(const GroupSpec& spec, const Point& p) {
  if (p.m() != spec.m() || p.dim() != spec.dim()) {
    throw std::invalid_argument("point dimensions do not match group");
  }
}

}  // namespace

Point multiply(const GroupSpec& spec, const Point& p, const Point& q) {
  check_dims(spec, p);
  check_dims(spec, q);
  const int m = spec.m();
  Point out(m, p.coords() + q.coords());
  for (int l = 0; l < spec.n(); ++l) {
    double bracket = 0.0;
    for (int i = 0; i < m; ++i) {
      if (p[i] == 0.0) continue;
      for (int j = 0; j < m; ++j) bracket += spec.b(i, j, l) * p[i] * q[j];
    }
    out[m + l] += 0.5 * bracket;
  }
  return out;
}

Point inverse(const Point& p) { return Point(p.m(), -p.coords()); }

Point identity(const GroupSpec& spec) { return Point(spec.m(), spec.n()); }

Point dilate(const GroupSpec& spec, double r, const Point& p) {
  if (!(r > 0.0)) throw std::invalid_argument("dilate: r must be positive");
  check_dims(spec, p);
  Point out = p;
  out.coords().head(spec.m()) *= r;
  out.coords().tail(spec.n()) *= r * r;
  return out;
}

double dilation_jacobian(const GroupSpec& spec, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("dilation_jacobian: r must be positive");
  return std::pow(r, spec.m()) * std::pow(r * r, spec.n());
}

Mat left_translation_jacobian(const GroupSpec& spec, const Point& z) {
  check_dims(spec, z);
  const int m = spec.m();
  Mat jac = Mat::Identity(spec.dim(), spec.dim());
  // d/dq_j of 1/2 sum_i b_{ij}^l z_i q_j
  for (int l = 0; l < spec.n(); ++l) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += spec.b(i, j, l) * z[i];
      jac(m + l, j) = 0.5 * acc;
    }
  }
  return jac;
}

Mat dilation_matrix(const GroupSpec& spec, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("dilation_matrix: r must be positive");
  Vec diag(spec.dim());
  diag.head(spec.m()).setConstant(r);
  diag.tail(spec.n()).setConstant(r * r);
  return diag.asDiagonal();
}

Mat frame(const GroupSpec& spec, const Point& p) {
  check_dims(spec, p);
  const int m = spec.m();
  Mat rows = Mat::Zero(m, spec.dim());
  for (int i = 0; i < m; ++i) {
    rows(i, i) = 1.0;
    for (int l = 0; l < spec.n(); ++l) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += spec.b(j, i, l) * p[j];
      rows(i, m + l) = 0.5 * acc;
    }
  }
  return rows;
}

Vec frame_pairing(const GroupSpec& spec, const Vec& coords, const Vec& v) {
  const int m = spec.m();
  Vec out(m);
  for (int i = 0; i < m; ++i) {
    double acc = v[i];
    for (int l = 0; l < spec.n(); ++l) {
      const double vl = v[m + l];
      if (vl == 0.0) continue;
      double c = 0.0;
      for (int j = 0; j < m; ++j) c += spec.b(j, i, l) * coords[j];
      acc += 0.5 * c * vl;
    }
    out[i] = acc;
  }
  return out;
}

Vec j_apply(const GroupSpec& spec, const Vec& eta, const Vec& xi) {
  const int m = spec.m();
  Vec out = Vec::Zero(m);
  for (int l = 0; l < spec.n(); ++l) {
    if (eta[l] == 0.0) continue;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out[j] += eta[l] * spec.b(i, j, l) * xi[i];
    }
  }
  return out;
}

Mat j_matrix(const GroupSpec& spec, const Vec& eta) {
  Mat out = Mat::Zero(spec.m(), spec.m());
  for (int l = 0; l < spec.n(); ++l) out += eta[l] * spec.bracket_matrix(l).transpose();
  return out;
}

HeisenbergTypeCheck is_heisenberg_type(const GroupSpec& spec, double tol) {
  const int n = spec.n();
  std::vector<Mat> js;
  js.reserve(n);
  for (int l = 0; l < n; ++l) js.push_back(j_matrix(spec, Vec::Unit(n, l)));
  const Mat id = Mat::Identity(spec.m(), spec.m());
  double worst = 0.0;
  for (int l = 0; l < n; ++l) {
    for (int k = l; k < n; ++k) {
      Mat defect = js[l].transpose() * js[k] + js[k].transpose() * js[l];
      if (l == k) defect -= 2.0 * id;
      worst = std::max(worst, defect.cwiseAbs().maxCoeff());
    }
  }
  return {worst <= tol, worst};
}

}  // namespace carnot
