#pragma once

// Dense Hermitian linear algebra for finite-dimensional quantum states.
//
// Every operator is stored densely as an Eigen::MatrixXcd. Matrix functions
// act on the spectrum; when restricted to the support, eigenvalues at or
// below the kernel threshold are mapped to zero (Moore-Penrose convention).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcont {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative Hermiticity tolerance: ||H - H^dag||_max <= 1e-12 * max(1, ||H||_max).
inline constexpr double kHermiticityTol = 1e-12;
/// Tolerance on negative eigenvalues and trace defect of density matrices.
inline constexpr double kStateTol = 1e-10;
/// Relative factor of the numerical-rank rule.
inline constexpr double kKernelFactor = 1e-12;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// An eigenvalue lambda counts as zero iff |lambda| <= dim * ||H||_max * 1e-12.
inline double kernel_threshold(const Matrix& m) {
  return static_cast<double>(m.rows()) * max_abs(m) * kKernelFactor;
}

class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw std::invalid_argument("HermitianOperator: matrix is not square (" +
                                  std::to_string(m_.rows()) + "x" +
                                  std::to_string(m_.cols()) + ")");
    }
    if (m_.rows() == 0) {
      throw std::invalid_argument("HermitianOperator: empty matrix");
    }
    const double asym = max_abs(m_ - m_.adjoint());
    const double scale = std::max(1.0, max_abs(m_));
    if (asym > kHermiticityTol * scale) {
      std::ostringstream os;
      os << "HermitianOperator: max asymmetry " << asym << " exceeds "
         << kHermiticityTol * scale;
      throw std::invalid_argument(os.str());
    }
    // Remove the residual anti-Hermitian roundoff.
    Matrix sym = (m_ + m_.adjoint()) * 0.5;
    m_ = std::move(sym);
  }

  static HermitianOperator identity(Index dim) {
    return unchecked(Matrix::Identity(dim, dim));
  }
  static HermitianOperator zero(Index dim) {
    return unchecked(Matrix::Zero(dim, dim));
  }
  static HermitianOperator diagonal(const std::vector<double>& d) {
    Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
    return unchecked(std::move(m));
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b);
    return unchecked(a.m_ + b.m_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b);
    return unchecked(a.m_ - b.m_);
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return unchecked(s * a.m_);
  }
  friend HermitianOperator operator*(const HermitianOperator& a, double s) { return s * a; }

  static void check_same_dim(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) {
      throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dim()) +
                                  " vs " + std::to_string(b.dim()));
    }
  }

  /// Wraps a matrix known to be Hermitian up to roundoff; symmetrizes without checking.
  static HermitianOperator unchecked(Matrix m) {
    HermitianOperator h;
    h.m_ = (m + m.adjoint()) * 0.5;
    return h;
  }

 private:
  Matrix m_;
};

struct EigenSystem {
  RVector values;   // ascending
  Matrix vectors;   // orthonormal columns
};

inline EigenSystem eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Validates Hermiticity first; throws std::invalid_argument with the asymmetry.
inline EigenSystem eig_hermitian(const Matrix& m) { return eig_hermitian(HermitianOperator(m)); }

inline Matrix reconstruct(const EigenSystem& es, const RVector& values) {
  return es.vectors * values.asDiagonal() * es.vectors.adjoint();
}

inline double min_eigenvalue(const HermitianOperator& h) { return eig_hermitian(h).values(0); }
inline double max_eigenvalue(const HermitianOperator& h) {
  const auto es = eig_hermitian(h);
  return es.values(es.values.size() - 1);
}

enum class Support { full, restricted };

/// V diag(fn(lambda)) V^dag. With Support::restricted, kernel eigenvalues map to 0.
template <class Fn>
HermitianOperator matrix_function(const HermitianOperator& h, Fn&& fn,
                                  Support support = Support::restricted) {
  const EigenSystem es = eig_hermitian(h);
  const double thr = kernel_threshold(h.matrix());
  RVector out(es.values.size());
  for (Index i = 0; i < es.values.size(); ++i) {
    const double lambda = es.values(i);
    if (support == Support::restricted && std::abs(lambda) <= thr) {
      out(i) = 0.0;
      continue;
    }
    const double v = fn(lambda);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "matrix_function: function undefined at eigenvalue " << lambda;
      throw std::domain_error(os.str());
    }
    out(i) = v;
  }
  return HermitianOperator::unchecked(reconstruct(es, out));
}

inline HermitianOperator log_op(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return std::log(x); });
}
inline HermitianOperator sqrt_op(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return std::sqrt(x); });
}
inline HermitianOperator pseudo_inverse(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return 1.0 / x; });
}
inline HermitianOperator inv_sqrt_op(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return 1.0 / std::sqrt(x); });
}

/// Pseudo-power P^z = V diag(lambda^z) V^dag on supp P, for PSD P and complex z.
inline Matrix complex_power(const HermitianOperator& p, Complex z) {
  const EigenSystem es = eig_hermitian(p);
  const double thr = kernel_threshold(p.matrix());
  CVector out(es.values.size());
  for (Index i = 0; i < es.values.size(); ++i) {
    const double lambda = es.values(i);
    if (lambda < -thr) {
      std::ostringstream os;
      os << "complex_power: negative eigenvalue " << lambda;
      throw std::domain_error(os.str());
    }
    out(i) = lambda <= thr ? Complex(0.0) : std::exp(z * std::log(lambda));
  }
  return es.vectors * out.asDiagonal() * es.vectors.adjoint();
}

inline double trace_norm(const HermitianOperator& h) {
  return eig_hermitian(h).values.cwiseAbs().sum();
}

class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Clips eigenvalues in [-1e-10, 0) and renormalizes a trace defect up to 1e-10.
  explicit DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
    const EigenSystem es = eig_hermitian(op_);
    const double lo = es.values(0);
    if (lo < -kStateTol) {
      std::ostringstream os;
      os << "DensityMatrix: smallest eigenvalue " << lo << " below -" << kStateTol;
      throw std::invalid_argument(os.str());
    }
    const double tr = op_.trace();
    if (std::abs(tr - 1.0) > kStateTol) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << tr << " differs from 1 by more than " << kStateTol;
      throw std::invalid_argument(os.str());
    }
    if (lo < 0.0) {
      op_ = HermitianOperator::unchecked(reconstruct(es, es.values.cwiseMax(0.0)));
    }
    const double t2 = op_.trace();
    if (t2 != 1.0) op_ = HermitianOperator::unchecked(op_.matrix() / t2);
  }

  explicit DensityMatrix(Matrix m) : DensityMatrix(HermitianOperator(std::move(m))) {}

  static DensityMatrix pure(const CVector& psi) {
    const CVector v = psi / psi.norm();
    return DensityMatrix(HermitianOperator::unchecked(v * v.adjoint()));
  }
  static DensityMatrix basis_state(Index dim, Index k) {
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    return pure(v);
  }
  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(HermitianOperator::unchecked(Matrix::Identity(dim, dim) / static_cast<double>(dim)));
  }
  static DensityMatrix diagonal(const std::vector<double>& probs) {
    return DensityMatrix(HermitianOperator::diagonal(probs));
  }

  Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  operator const HermitianOperator&() const { return op_; }  // NOLINT

 private:
  HermitianOperator op_;
};

/// Convex combination p a + (1-p) b of two states.
inline DensityMatrix mix(double p, const DensityMatrix& a, const DensityMatrix& b) {
  HermitianOperator::check_same_dim(a.op(), b.op());
  return DensityMatrix(HermitianOperator::unchecked(p * a.matrix() + (1.0 - p) * b.matrix()));
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  HermitianOperator::check_same_dim(rho.op(), sigma.op());
  return std::min(1.0, 0.5 * trace_norm(rho.op() - sigma.op()));
}

struct JordanParts {
  HermitianOperator positive;
  HermitianOperator negative;
};

/// H = [H]_+ - [H]_- with both parts PSD and mutually orthogonal.
inline JordanParts jordan_decomposition(const HermitianOperator& h) {
  const EigenSystem es = eig_hermitian(h);
  const RVector pos = es.values.cwiseMax(0.0);
  const RVector neg = (-es.values).cwiseMax(0.0);
  return {HermitianOperator::unchecked(reconstruct(es, pos)),
          HermitianOperator::unchecked(reconstruct(es, neg))};
}

/// Projector onto the eigenspaces with |lambda| > tol.
inline HermitianOperator support_projector(const HermitianOperator& h, double tol) {
  const EigenSystem es = eig_hermitian(h);
  RVector ind(es.values.size());
  for (Index i = 0; i < es.values.size(); ++i) ind(i) = std::abs(es.values(i)) > tol ? 1.0 : 0.0;
  return HermitianOperator::unchecked(reconstruct(es, ind));
}

inline HermitianOperator support_projector(const HermitianOperator& h) {
  return support_projector(h, kernel_threshold(h.matrix()));
}

/// Numerical rank under the kernel-threshold rule.
inline Index numerical_rank(const HermitianOperator& h) {
  const double thr = kernel_threshold(h.matrix());
  const RVector v = eig_hermitian(h).values;
  return static_cast<Index>((v.array().abs() > thr).count());
}

inline bool is_full_rank(const HermitianOperator& h) { return numerical_rank(h) == h.dim(); }

/// Smallest eigenvalue above the kernel threshold (m~ of the divergence bounds).
inline double min_nonzero_eigenvalue(const HermitianOperator& h) {
  const double thr = kernel_threshold(h.matrix());
  const RVector v = eig_hermitian(h).values;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) > thr) return v(i);
  }
  throw std::domain_error("min_nonzero_eigenvalue: operator has no support");
}

/// Weight of rho on ker sigma: ||(I - P_sigma) rho (I - P_sigma)||_max.
inline double kernel_leakage(const HermitianOperator& sigma, const HermitianOperator& rho) {
  HermitianOperator::check_same_dim(sigma, rho);
  const Matrix k = Matrix::Identity(sigma.dim(), sigma.dim()) - support_projector(sigma).matrix();
  return max_abs(k * rho.matrix() * k);
}

/// ker sigma is contained in ker rho, up to a leakage tolerance.
inline bool kernel_included(const HermitianOperator& sigma, const HermitianOperator& rho,
                            double tol = kStateTol) {
  return kernel_leakage(sigma, rho) <= tol;
}

/// A - B is PSD up to tol.
inline bool psd_dominates(const HermitianOperator& a, const HermitianOperator& b, double tol = kStateTol) {
  return min_eigenvalue(a - b) >= -tol;
}

// ---------------------------------------------------------------------------
// Tensor structure

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::vector<std::string> labels, std::vector<Index> dims)
      : labels_(std::move(labels)), dims_(std::move(dims)) {
    if (labels_.size() != dims_.size() || labels_.empty()) {
      throw std::invalid_argument("SubsystemLayout: labels and dims must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] < 1) throw std::invalid_argument("SubsystemLayout: dims must be positive");
      for (std::size_t j = 0; j < i; ++j) {
        if (labels_[i] == labels_[j]) {
          throw std::invalid_argument("SubsystemLayout: duplicate label " + labels_[i]);
        }
      }
    }
  }

  /// Labels "A", "B", "C", ... for the given dims.
  static SubsystemLayout lettered(std::vector<Index> dims) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < dims.size(); ++i) labels.emplace_back(1, static_cast<char>('A' + i));
    return SubsystemLayout(std::move(labels), std::move(dims));
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Index>& dims() const { return dims_; }
  std::size_t size() const { return labels_.size(); }
  Index total_dim() const {
    return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
  }

  std::size_t index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::invalid_argument("SubsystemLayout: unknown label " + label);
    return static_cast<std::size_t>(it - labels_.begin());
  }
  Index dim_of(const std::string& label) const { return dims_[index_of(label)]; }

  /// Sorted factor positions of the given labels; rejects empty or unknown sets.
  std::vector<std::size_t> positions(const std::vector<std::string>& subset) const {
    if (subset.empty()) throw std::invalid_argument("SubsystemLayout: empty subsystem set");
    std::vector<std::size_t> pos;
    for (const auto& l : subset) pos.push_back(index_of(l));
    std::sort(pos.begin(), pos.end());
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end()) {
      throw std::invalid_argument("SubsystemLayout: repeated label in subsystem set");
    }
    return pos;
  }

  /// Layout of the given factors, in layout order.
  SubsystemLayout restrict_to(const std::vector<std::string>& subset) const {
    std::vector<std::string> l;
    std::vector<Index> d;
    for (std::size_t p : positions(subset)) {
      l.push_back(labels_[p]);
      d.push_back(dims_[p]);
    }
    return SubsystemLayout(std::move(l), std::move(d));
  }

  void check_dim(Index dim) const {
    if (total_dim() != dim) {
      throw std::invalid_argument("SubsystemLayout: product of dims " + std::to_string(total_dim()) +
                                  " does not match operator dim " + std::to_string(dim));
    }
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Index> dims_;
};

namespace detail {

// Mixed-radix digits of a row-major composite index; factor 0 is most significant.
inline std::vector<Index> digits(Index i, const std::vector<Index>& dims) {
  std::vector<Index> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = i % dims[k];
    i /= dims[k];
  }
  return d;
}

inline Index compose(const std::vector<Index>& digits, const std::vector<Index>& dims) {
  Index i = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) i = i * dims[k] + digits[k];
  return i;
}

// For every full index: its sub-index on `kept` factors and on the rest.
struct SplitIndex {
  std::vector<Index> kept;
  std::vector<Index> rest;
  Index kept_dim = 1;
  Index rest_dim = 1;
};

inline SplitIndex split_index(const SubsystemLayout& layout, const std::vector<std::size_t>& kept_pos) {
  const auto& dims = layout.dims();
  std::vector<bool> is_kept(dims.size(), false);
  for (auto p : kept_pos) is_kept[p] = true;
  std::vector<Index> kd, rd;
  for (std::size_t k = 0; k < dims.size(); ++k) (is_kept[k] ? kd : rd).push_back(dims[k]);
  SplitIndex s;
  for (auto d : kd) s.kept_dim *= d;
  for (auto d : rd) s.rest_dim *= d;
  const Index n = layout.total_dim();
  s.kept.resize(static_cast<std::size_t>(n));
  s.rest.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto dg = digits(i, dims);
    std::vector<Index> a, b;
    for (std::size_t k = 0; k < dims.size(); ++k) (is_kept[k] ? a : b).push_back(dg[k]);
    s.kept[static_cast<std::size_t>(i)] = compose(a, kd);
    s.rest[static_cast<std::size_t>(i)] = compose(b, rd);
  }
  return s;
}

}  // namespace detail

/// Partial trace keeping the listed factors (result ordered as in the layout).
inline HermitianOperator partial_trace(const HermitianOperator& h, const SubsystemLayout& layout,
                                       const std::vector<std::string>& keep) {
  layout.check_dim(h.dim());
  const auto s = detail::split_index(layout, layout.positions(keep));
  Matrix out = Matrix::Zero(s.kept_dim, s.kept_dim);
  const Index n = h.dim();
  const Matrix& m = h.matrix();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (s.rest[static_cast<std::size_t>(i)] == s.rest[static_cast<std::size_t>(j)]) {
        out(s.kept[static_cast<std::size_t>(i)], s.kept[static_cast<std::size_t>(j)]) += m(i, j);
      }
    }
  }
  return HermitianOperator::unchecked(std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemLayout& layout,
                                   const std::vector<std::string>& keep) {
  return DensityMatrix(partial_trace(rho.op(), layout, keep));
}

/// X acting on `factors` (layout order), extended by identities on the rest.
inline HermitianOperator embed(const HermitianOperator& x, const SubsystemLayout& layout,
                               const std::vector<std::string>& factors) {
  const auto s = detail::split_index(layout, layout.positions(factors));
  if (x.dim() != s.kept_dim) {
    throw std::invalid_argument("embed: operator dim " + std::to_string(x.dim()) +
                                " does not match factor dim " + std::to_string(s.kept_dim));
  }
  const Index n = layout.total_dim();
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (s.rest[static_cast<std::size_t>(i)] == s.rest[static_cast<std::size_t>(j)]) {
        out(i, j) = x.matrix()(s.kept[static_cast<std::size_t>(i)], s.kept[static_cast<std::size_t>(j)]);
      }
    }
  }
  return HermitianOperator::unchecked(std::move(out));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator::unchecked(kron(a.matrix(), b.matrix()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.op(), b.op()));
}

namespace detail {
inline void check_orthonormal_basis(const Matrix& basis, Index dim) {
  if (basis.rows() != dim || basis.cols() != dim) {
    throw std::invalid_argument("pinch: basis must hold " + std::to_string(dim) +
                                " vectors of length " + std::to_string(dim));
  }
  const double err = max_abs(basis.adjoint() * basis - Matrix::Identity(dim, dim));
  if (err > 1e-10) {
    std::ostringstream os;
    os << "pinch: basis not orthonormal (max deviation " << err << ")";
    throw std::invalid_argument(os.str());
  }
}
}  // namespace detail

/// sum_z |e_z><e_z| rho |e_z><e_z| for the orthonormal columns e_z of `basis`.
inline DensityMatrix pinch(const DensityMatrix& rho, const Matrix& basis) {
  detail::check_orthonormal_basis(basis, rho.dim());
  const Matrix in_basis = basis.adjoint() * rho.matrix() * basis;
  const CVector d = in_basis.diagonal();
  return DensityMatrix(HermitianOperator::unchecked(basis * d.asDiagonal() * basis.adjoint()));
}

/// Pinching on one tensor factor, identity on the others: (E_Z (x) id)(rho).
inline DensityMatrix pinch_factor(const DensityMatrix& rho, const SubsystemLayout& layout,
                                  const std::string& factor, const Matrix& basis) {
  layout.check_dim(rho.dim());
  const Index d = layout.dim_of(factor);
  detail::check_orthonormal_basis(basis, d);
  // Full-space unitary U (x) I mapping computational digits to basis vectors.
  Matrix u = Matrix::Zero(rho.dim(), rho.dim());
  const auto s = detail::split_index(layout, layout.positions({factor}));
  for (Index i = 0; i < rho.dim(); ++i) {
    for (Index j = 0; j < rho.dim(); ++j) {
      if (s.rest[static_cast<std::size_t>(i)] == s.rest[static_cast<std::size_t>(j)]) {
        u(i, j) = basis(s.kept[static_cast<std::size_t>(i)], s.kept[static_cast<std::size_t>(j)]);
      }
    }
  }
  Matrix in_basis = u.adjoint() * rho.matrix() * u;
  for (Index i = 0; i < rho.dim(); ++i) {
    for (Index j = 0; j < rho.dim(); ++j) {
      if (s.kept[static_cast<std::size_t>(i)] != s.kept[static_cast<std::size_t>(j)]) in_basis(i, j) = 0.0;
    }
  }
  return DensityMatrix(HermitianOperator::unchecked(u * in_basis * u.adjoint()));
}

}  // namespace qcont
