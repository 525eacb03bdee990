#pragma once

// Seeded random states and unitaries. Every sampler is a pure function of its
// seed so campaigns can run trials in any order.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "qcont/operator_core.hpp"

namespace qcont {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed for trial `index` of a campaign started with `master`.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ull));
}

/// Mersenne twister seeded through splitmix64; the raw seed is never used directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Complex complex_normal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline Matrix ginibre_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

/// Haar unitary: QR of a Ginibre matrix with the phases of R's diagonal removed.
inline Matrix haar_unitary(Index dim, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

inline Matrix haar_unitary(Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(dim, rng);
}

/// Hermitian matrix with independent Gaussian entries (GUE up to scaling).
inline HermitianOperator random_hermitian(Index dim, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, dim, rng);
  return HermitianOperator::unchecked(0.5 * (g + g.adjoint()));
}

/// Random PSD operator G G^dag (not normalized).
inline HermitianOperator random_psd(Index dim, Rng& rng) {
  const Matrix g = ginibre_matrix(dim, dim, rng);
  return HermitianOperator::unchecked(g * g.adjoint());
}

inline DensityMatrix sample_pure(Index dim, Rng& rng) {
  CVector psi(dim);
  for (Index i = 0; i < dim; ++i) psi(i) = rng.complex_normal();
  return DensityMatrix::pure(psi / psi.norm());
}

inline DensityMatrix sample_pure(Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return sample_pure(dim, rng);
}

/// Induced-measure state G G^dag / tr with G of size dim x rank. Resamples
/// (up to 64 times) if the numerical rank comes out short.
inline DensityMatrix sample_ginibre_state(Index dim, Index rank, Rng& rng) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw std::invalid_argument("sample_ginibre_state: need 1 <= rank <= dim, got rank " + std::to_string(rank) +
                                " for dim " + std::to_string(dim));
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Matrix g = ginibre_matrix(dim, rank, rng);
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    auto op = HermitianOperator::unchecked(0.5 * (m + m.adjoint()));
    if (numerical_rank(op) == rank) return DensityMatrix(std::move(op));
  }
  throw std::runtime_error("sample_ginibre_state: could not reach the requested rank");
}

inline DensityMatrix sample_ginibre_state(Index dim, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ginibre_state(dim, rank, rng);
}

/// (1 - dim m) G + m 1 with G a full-rank Ginibre state; smallest eigenvalue >= m.
inline DensityMatrix sample_min_eig_floor(Index dim, double m, Rng& rng) {
  if (!(m > 0.0) || !(m < 1.0 / static_cast<double>(dim))) {
    throw std::invalid_argument("sample_min_eig_floor: m must lie in (0, 1/dim)");
  }
  const DensityMatrix g = sample_ginibre_state(dim, dim, rng);
  const double w = 1.0 - static_cast<double>(dim) * m;
  return DensityMatrix(HermitianOperator::unchecked(w * g.matrix() + m * Matrix::Identity(dim, dim)));
}

inline DensityMatrix sample_min_eig_floor(Index dim, double m, std::uint64_t seed) {
  Rng rng(seed);
  return sample_min_eig_floor(dim, m, rng);
}

/// State of rank between 1 and dim chosen uniformly.
inline DensityMatrix sample_mixed_rank(Index dim, Rng& rng) {
  const Index rank = 1 + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(dim));
  return sample_ginibre_state(dim, rank, rng);
}

/// State whose support contains the support of rho: rho mixed with a random
/// state living on a random superspace of supp(rho).
inline DensityMatrix sample_dominating(const DensityMatrix& rho, Rng& rng) {
  const Index dim = rho.dim();
  const Index r = numerical_rank(rho.op());
  const Index extra = static_cast<Index>(rng.next() % static_cast<std::uint64_t>(dim - r + 1));
  const DensityMatrix other = sample_ginibre_state(dim, dim, rng);
  Matrix target = other.matrix();
  if (r + extra < dim) {
    // Restrict `other` to supp(rho) plus `extra` random kernel directions.
    const EigenSystem es = eig_hermitian(rho.op());
    const Index zeros = dim - r;
    Matrix kernel = es.vectors.leftCols(zeros);
    const Matrix mix_u = haar_unitary(zeros, rng);
    kernel = kernel * mix_u;
    Matrix basis(dim, r + extra);
    basis << es.vectors.rightCols(r), kernel.leftCols(extra);
    const Matrix proj = basis * basis.adjoint();
    target = proj * target * proj;
    target /= target.trace().real();
  }
  const double w = rng.uniform(0.05, 0.95);
  return DensityMatrix(HermitianOperator::unchecked(w * rho.matrix() + (1.0 - w) * 0.5 * (target + target.adjoint())));
}

}  // namespace qcont
