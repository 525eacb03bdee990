#pragma once

// Entropic uncertainty with quantum memory, the approximate Markov chain
// sandwich built on the Petz recovery, and relative-entropy distances to
// convex state sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcont/almost_concavity.hpp"
#include "qcont/bound_catalog.hpp"
#include "qcont/entropies.hpp"
#include "qcont/operator_core.hpp"
#include "qcont/report.hpp"
#include "qcont/sampling.hpp"

namespace qcont {

// ---------------------------------------------------------------------------
// Markov chains

struct PetzRecovery {
  HermitianOperator op;
  /// rho_B was rank deficient and its inverse square root was taken on the support.
  bool singular_b = false;
};

/// rho_AB^{1/2} rho_B^{-1/2} rho_BC rho_B^{-1/2} rho_AB^{1/2} on a tripartite layout (A, B, C),
/// every factor extended by identities.
inline PetzRecovery petz_recovery(const DensityMatrix& rho, const SubsystemLayout& layout) {
  detail::check_tripartite(layout);
  layout.check_dim(rho.dim());
  const auto& l = layout.labels();
  const std::string& a = l[0];
  const std::string& b = l[1];
  const std::string& c = l[2];
  const HermitianOperator rho_ab = partial_trace(rho.op(), layout, {a, b});
  const HermitianOperator rho_b = partial_trace(rho.op(), layout, {b});
  const HermitianOperator rho_bc = partial_trace(rho.op(), layout, {b, c});
  const Matrix ab_half = embed(sqrt_op(rho_ab), layout, {a, b}).matrix();
  const Matrix b_inv_half = embed(inv_sqrt_op(rho_b), layout, {b}).matrix();
  const Matrix bc = embed(rho_bc, layout, {b, c}).matrix();
  Matrix out = ab_half * b_inv_half * bc * b_inv_half * ab_half;
  out = 0.5 * (out + out.adjoint());
  return {HermitianOperator::unchecked(std::move(out)), !is_full_rank(rho_b)};
}

struct MarkovSandwich {
  /// Missing when rho_ABC is rank deficient.
  std::optional<double> lower;
  double cmi = 0.0;
  double upper = 0.0;
  /// ||rho_ABC - Petz recovery||_1
  double recovery_distance = 0.0;
};

/// (pi/8)^4 ||rho_B^{-1}||^{-2} ||rho_ABC^{-1}||^{-2} ||Delta||_1^4 <= I(A:C|B)
///   <= 2 (log min{d_A, d_C} + 1) ||Delta||_1^{1/2}, Delta = rho_ABC - Petz recovery.
inline MarkovSandwich markov_sandwich(const DensityMatrix& rho, const SubsystemLayout& layout) {
  const PetzRecovery rec = petz_recovery(rho, layout);
  const auto& l = layout.labels();
  MarkovSandwich s;
  s.recovery_distance = trace_norm(rho.op() - rec.op);
  // A distance at the level of the kernel threshold is roundoff in the
  // recovery product; the square root in the upper bound would inflate it.
  if (s.recovery_distance <= kernel_threshold(rho.matrix())) s.recovery_distance = 0.0;
  s.cmi = conditional_mutual_information(rho, layout, l[0], l[2], l[1]);
  const double d_min = static_cast<double>(std::min(layout.dims()[0], layout.dims()[2]));
  s.upper = 2.0 * (std::log(d_min) + 1.0) * std::sqrt(s.recovery_distance);
  if (is_full_rank(rho.op())) {
    const double lb = min_eigenvalue(partial_trace(rho.op(), layout, {l[1]}));
    const double labc = min_eigenvalue(rho.op());
    s.lower = std::pow(std::numbers::pi / 8.0, 4) * lb * lb * labc * labc * std::pow(s.recovery_distance, 4);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Uncertainty relation

/// Two orthonormal bases of H_A stored as matrix columns.
class BasisPair {
 public:
  BasisPair(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() != y_.rows()) throw std::invalid_argument("BasisPair: bases act on different dimensions");
    detail::check_orthonormal_basis(x_, x_.rows());
    detail::check_orthonormal_basis(y_, y_.rows());
    overlap_ = (x_.adjoint() * y_).cwiseAbs2();
  }

  static BasisPair computational_and(const Matrix& y) { return {Matrix::Identity(y.rows(), y.rows()), y}; }

  /// Computational and Fourier bases, mutually unbiased in every dimension.
  static BasisPair fourier(Index d) {
    Matrix f(d, d);
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < d; ++k) {
        f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), 2.0 * std::numbers::pi * j * k / d);
      }
    }
    return computational_and(f);
  }

  Index dim() const { return x_.rows(); }
  const Matrix& basis_x() const { return x_; }
  const Matrix& basis_y() const { return y_; }
  /// |<e_x|e_y>|^2, rows indexed by x.
  const Eigen::MatrixXd& overlaps() const { return overlap_; }

 private:
  Matrix x_;
  Matrix y_;
  Eigen::MatrixXd overlap_;
};

struct UncertaintyConstants {
  double m = 0.0;
  /// Missing when m = 0 (some pair of basis vectors orthogonal).
  std::optional<double> xi;
};

/// m = min{1/d^2, (1/d) min |<e_x|e_y>|^2} and
/// xi = 3 log^2(1/m) / (1 - m) (sum_x max_y |1/d - |<e_x|e_y>|^2|)^{1/2}.
inline UncertaintyConstants uncertainty_constants(const BasisPair& bases) {
  const double d = static_cast<double>(bases.dim());
  const auto& o = bases.overlaps();
  UncertaintyConstants c;
  c.m = std::min(1.0 / (d * d), o.minCoeff() / d);
  if (c.m <= 1e-14) {
    c.m = 0.0;
    return c;
  }
  double spread = 0.0;
  for (Index x = 0; x < o.rows(); ++x) {
    double row = 0.0;
    for (Index y = 0; y < o.cols(); ++y) {
      double gap = std::abs(1.0 / d - o(x, y));
      if (gap < 1e-14) gap = 0.0;  // mutually unbiased up to rounding
      row = std::max(row, gap);
    }
    spread += row;
  }
  const double l = std::log(1.0 / c.m);
  c.xi = 3.0 * l * l / (1.0 - c.m) * std::sqrt(spread);
  return c;
}

struct UncertaintyTerms {
  double h_x_given_m;
  double h_y_given_m;
  double h_a_given_m;
  double xi;
};

/// H(X|M) + H(Y|M) >= -xi + H(A|M) on a bipartite layout (A, M).
inline UncertaintyTerms uncertainty_terms(const DensityMatrix& rho, const SubsystemLayout& layout,
                                          const BasisPair& bases) {
  detail::check_bipartite(layout);
  const auto& l = layout.labels();
  if (layout.dims()[0] != bases.dim()) throw std::invalid_argument("check_uncertainty: basis dimension != d_A");
  const UncertaintyConstants c = uncertainty_constants(bases);
  if (!c.xi) throw std::domain_error("check_uncertainty: m = 0, xi unavailable (orthogonal basis vectors)");
  const DensityMatrix px = pinch_factor(rho, layout, l[0], bases.basis_x());
  const DensityMatrix py = pinch_factor(rho, layout, l[0], bases.basis_y());
  return {conditional_entropy(px, layout, l[1]), conditional_entropy(py, layout, l[1]),
          conditional_entropy(rho, layout, l[1]), *c.xi};
}

inline BoundReport check_uncertainty(const DensityMatrix& rho, const SubsystemLayout& layout, const BasisPair& bases,
                                     double tol = 1e-8) {
  const UncertaintyTerms t = uncertainty_terms(rho, layout, bases);
  // measured = H(A|M) - xi, bound = H(X|M) + H(Y|M); margin is the printed one.
  return BoundReport::upper("uncertainty_relation", fingerprint({&rho.matrix(), &bases.basis_y()}), 0.0,
                            t.h_a_given_m - t.xi, t.h_x_given_m + t.h_y_given_m, tol);
}

// ---------------------------------------------------------------------------
// Distances to convex sets

/// Hermitian d x d matrix from d^2 reals: diagonal first, then (re, im) of the upper triangle.
inline Matrix hermitian_from_params(std::span<const double> theta, Index d) {
  Matrix h = Matrix::Zero(d, d);
  std::size_t k = 0;
  for (Index i = 0; i < d; ++i) h(i, i) = theta[k++];
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      h(i, j) = Complex(theta[k], theta[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  }
  return h;
}

inline std::vector<double> params_from_hermitian(const Matrix& h) {
  const Index d = h.rows();
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(d * d));
  for (Index i = 0; i < d; ++i) theta.push_back(h(i, i).real());
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      theta.push_back(h(i, j).real());
      theta.push_back(h(i, j).imag());
    }
  }
  return theta;
}

/// exp(H) / tr exp(H), computed through the eigendecomposition of H.
inline DensityMatrix gibbs_state(const Matrix& h) {
  const EigenSystem es = eig_hermitian(HermitianOperator::unchecked(0.5 * (h + h.adjoint())));
  const double top = es.values.maxCoeff();
  RVector w = (es.values.array() - top).exp();
  w /= w.sum();
  return DensityMatrix(HermitianOperator::unchecked(reconstruct(es, w)));
}

/// Parameters whose Gibbs state is (close to) gamma; eigenvalues floored at 1e-12.
inline std::vector<double> gibbs_params(const DensityMatrix& gamma) {
  const EigenSystem es = eig_hermitian(gamma.op());
  const RVector logs = es.values.cwiseMax(1e-12).array().log();
  return params_from_hermitian(reconstruct(es, logs));
}

struct ConvexSet {
  std::string name;
  std::size_t parameter_count = 0;
  std::function<DensityMatrix(std::span<const double>)> state;
  /// Full-rank member used as the reference point gamma_0.
  DensityMatrix anchor;
  /// Problem-specific starting points (e.g. from the marginals of rho).
  std::function<std::vector<std::vector<double>>(const DensityMatrix&)> warm_starts;
  bool contains_full_rank = true;
};

/// {1_A/d_A (x) sigma_B} on a bipartite layout (A, B).
inline ConvexSet locally_maximally_mixed(const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  const Index da = layout.dims()[0], db = layout.dims()[1];
  ConvexSet c;
  c.name = "locally_maximally_mixed";
  c.parameter_count = static_cast<std::size_t>(db * db);
  c.state = [da, db](std::span<const double> theta) {
    return tensor(DensityMatrix::maximally_mixed(da), gibbs_state(hermitian_from_params(theta, db)));
  };
  c.anchor = DensityMatrix::maximally_mixed(da * db);
  c.warm_starts = [layout](const DensityMatrix& rho) {
    return std::vector<std::vector<double>>{gibbs_params(partial_trace(rho, layout, {layout.labels()[1]}))};
  };
  return c;
}

/// Product states sigma_A (x) sigma_B. Not convex; stands in for the separable set.
inline ConvexSet product_states(const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  const Index da = layout.dims()[0], db = layout.dims()[1];
  const auto na = static_cast<std::size_t>(da * da);
  ConvexSet c;
  c.name = "product_states";
  c.parameter_count = na + static_cast<std::size_t>(db * db);
  c.state = [da, db, na](std::span<const double> theta) {
    return tensor(gibbs_state(hermitian_from_params(theta.first(na), da)),
                  gibbs_state(hermitian_from_params(theta.subspan(na), db)));
  };
  c.anchor = DensityMatrix::maximally_mixed(da * db);
  c.warm_starts = [layout](const DensityMatrix& rho) {
    auto a = gibbs_params(partial_trace(rho, layout, {layout.labels()[0]}));
    const auto b = gibbs_params(partial_trace(rho, layout, {layout.labels()[1]}));
    a.insert(a.end(), b.begin(), b.end());
    return std::vector<std::vector<double>>{a};
  };
  return c;
}

struct SolverConfig {
  int max_iters = 2000;
  double grad_tol = 1e-7;
  /// Stop when the objective dropped by less than this (relative) over `window` iterations.
  double rel_decrease_tol = 1e-9;
  int window = 25;
  /// Random starts on top of the anchor and the warm starts.
  int starts = 5;
  std::uint64_t seed = 42;
  double fd_step = 1e-6;
};

struct OptimizationResult {
  double value = std::numeric_limits<double>::infinity();
  DensityMatrix minimizer;
  std::vector<double> parameters;
  bool converged = false;
  int iterations = 0;
  /// Objective after each accepted step of the winning start (nonincreasing).
  std::vector<double> objective_log;
  std::string diagnostic;
};

namespace detail {

struct LocalRun {
  double value;
  std::vector<double> theta;
  bool converged;
  int iterations;
  std::vector<double> log;
};

// BFGS with Armijo backtracking and central-difference gradients.
inline LocalRun minimize_from(const std::function<double(std::span<const double>)>& obj, std::vector<double> x,
                              const SolverConfig& cfg) {
  const std::size_t n = x.size();
  auto gradient = [&](const std::vector<double>& at) {
    Eigen::VectorXd g(static_cast<Index>(n));
    std::vector<double> probe = at;
    for (std::size_t i = 0; i < n; ++i) {
      probe[i] = at[i] + cfg.fd_step;
      const double up = obj(probe);
      probe[i] = at[i] - cfg.fd_step;
      const double down = obj(probe);
      probe[i] = at[i];
      g(static_cast<Index>(i)) = (up - down) / (2.0 * cfg.fd_step);
    }
    return g;
  };
  LocalRun run{obj(x), x, false, 0, {}};
  run.log.push_back(run.value);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(static_cast<Index>(n), static_cast<Index>(n));
  Eigen::VectorXd g = gradient(x);
  for (int it = 0; it < cfg.max_iters; ++it) {
    run.iterations = it + 1;
    if (g.norm() < cfg.grad_tol) {
      run.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    std::vector<double> trial(n);
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * dir(static_cast<Index>(i));
      f_trial = obj(trial);
      if (std::isfinite(f_trial) && f_trial <= run.value + 1e-4 * step * dir.dot(g)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) {
        run.converged = true;  // no descent possible at finite-difference resolution
        break;
      }
      hinv.setIdentity();
      continue;
    }
    const Eigen::VectorXd g_new = gradient(trial);
    Eigen::VectorXd s(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) s(static_cast<Index>(i)) = trial[i] - x[i];
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(static_cast<Index>(n), static_cast<Index>(n));
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    x = trial;
    g = g_new;
    run.value = f_trial;
    run.theta = x;
    run.log.push_back(f_trial);
    const auto w = static_cast<std::size_t>(cfg.window);
    if (run.log.size() > w) {
      const double old = run.log[run.log.size() - 1 - w];
      if (old - run.value <= cfg.rel_decrease_tol * std::max(1.0, std::abs(old))) {
        run.converged = true;
        break;
      }
    }
  }
  return run;
}

}  // namespace detail

/// D_C(rho) = inf over gamma in C of D(rho || gamma), minimized over the Gibbs
/// parametrization from the anchor, the warm starts and `starts` random points.
inline OptimizationResult optimized_divergence(const DensityMatrix& rho, const ConvexSet& set, DivergenceKind kind,
                                               const SolverConfig& cfg = {}) {
  if (!set.contains_full_rank) throw std::invalid_argument("optimized_divergence: " + set.name + " has no full-rank member");
  if (set.anchor.dim() != rho.dim()) throw std::invalid_argument("optimized_divergence: dimension mismatch");
  auto objective = [&](std::span<const double> theta) {
    return divergence(kind, rho.op(), set.state(theta).op()).value;
  };
  std::vector<std::vector<double>> starts;
  starts.emplace_back(set.parameter_count, 0.0);
  if (set.warm_starts) {
    for (auto& w : set.warm_starts(rho)) starts.push_back(std::move(w));
  }
  Rng rng(cfg.seed);
  for (int s = 0; s < cfg.starts; ++s) {
    std::vector<double> theta(set.parameter_count);
    for (auto& v : theta) v = rng.normal();
    starts.push_back(std::move(theta));
  }

  OptimizationResult best;
  const double anchor_value = divergence(kind, rho.op(), set.anchor.op()).value;
  for (const auto& start : starts) {
    const detail::LocalRun run = detail::minimize_from(objective, start, cfg);
    if (run.value < best.value) {
      best.value = run.value;
      best.parameters = run.theta;
      best.converged = run.converged;
      best.iterations = run.iterations;
      best.objective_log = run.log;
    }
  }
  best.minimizer = set.state(best.parameters);
  if (!best.converged) best.diagnostic = "iteration limit reached; best iterate returned";
  if (best.value > anchor_value + 1e-12) {
    best.diagnostic = "solver ended above the anchor value";
  }
  return best;
}

/// H^var(A|B) = sup over sigma_B of -D^(rho_AB || 1_A (x) sigma_B) = log d_A - D^_C(rho)
/// with C = {1_A/d_A (x) sigma_B}.
inline double variational_bs_conditional_entropy(const DensityMatrix& rho, const SubsystemLayout& layout,
                                                 const SolverConfig& cfg = {}) {
  const ConvexSet set = locally_maximally_mixed(layout);
  const OptimizationResult r = optimized_divergence(rho, set, DivergenceKind::bs, cfg);
  return std::log(static_cast<double>(layout.dims()[0])) - r.value;
}

using DivergenceToSet = std::function<double(const DensityMatrix&)>;

/// -envelope(p) - tol <= D_C(p rho + (1-p) sigma) - p D_C(rho) - (1-p) D_C(sigma) <= tol,
/// envelope h for the Umegaki entropy and g_d with d = dim H for the BS entropy.
/// The envelope is zero at p in {0, 1}, where the deviation vanishes identically.
inline std::vector<BoundReport> check_dc_almost_affinity(const DivergenceToSet& d_c, DivergenceKind kind,
                                                         const DensityMatrix& rho, const DensityMatrix& sigma,
                                                         const std::vector<double>& p_grid, double tol = 1e-6) {
  const double at_rho = d_c(rho);
  const double at_sigma = d_c(sigma);
  const int d = static_cast<int>(rho.dim());
  const std::string fp = fingerprint({&rho.matrix(), &sigma.matrix()});
  const std::string name = std::string("dc_almost_affinity_") + to_string(kind);
  std::vector<BoundReport> out;
  for (double p : p_grid) {
    double deviation = 0.0, envelope = 0.0;
    if (p > 0.0 && p < 1.0) {
      deviation = d_c(mix(p, rho, sigma)) - p * at_rho - (1.0 - p) * at_sigma;
      envelope = kind == DivergenceKind::umegaki ? binary_entropy(p) : g_d(p, d);
    }
    out.push_back(BoundReport::sandwich(name, fp, p, -envelope, deviation, 0.0, tol));
  }
  return out;
}

}  // namespace qcont
