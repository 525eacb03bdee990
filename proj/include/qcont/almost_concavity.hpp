#pragma once

// Almost concavity of the Umegaki and Belavkin-Staszewski relative entropies:
//
//   -f(p) <= D(rho_p || sigma_p) - p D(rho_1 || sigma_1) - (1-p) D(rho_2 || sigma_2) <= 0
//
// with rho_p = p rho_1 + (1-p) rho_2 and sigma_p likewise. The remainders are
// built from the binary entropy and f_{a1,a2}, whose constants come from
//
//   alpha(O, P, Q) = int dt beta0(t) tr[O P^{(1+it)/2} Q P^{(1-it)/2}],
//   beta0(t)       = (pi/2) / (cosh(pi t) + 1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qcont/entropies.hpp"
#include "qcont/operator_core.hpp"
#include "qcont/report.hpp"

namespace qcont {

enum class DivergenceKind { umegaki, bs };

inline const char* to_string(DivergenceKind k) { return k == DivergenceKind::umegaki ? "umegaki" : "bs"; }

inline EntropyValue divergence(DivergenceKind kind, const HermitianOperator& rho, const HermitianOperator& sigma) {
  return kind == DivergenceKind::umegaki ? umegaki(rho, sigma) : bs_entropy(rho, sigma);
}

inline double beta0(double t) {
  return 0.5 * std::numbers::pi / (std::cosh(std::numbers::pi * t) + 1.0);
}

/// Mass of beta0 outside [-T, T]: 2 / (1 + e^{pi T}).
inline double beta0_tail(double truncation) {
  return 2.0 / (1.0 + std::exp(std::numbers::pi * truncation));
}

struct QuadratureConfig {
  double truncation = 12.0;
  double abs_tol = 1e-10;
  /// Bound on interval bisections; mapped to the Gauss-Kronrod recursion depth.
  int max_subdivisions = 4096;
};

/// Truncation large enough that the neglected tail, weighted by `scale`,
/// stays below abs_tol / 10.
inline double effective_truncation(const QuadratureConfig& cfg, double scale) {
  double t = cfg.truncation;
  while (beta0_tail(t) * std::max(scale, 1.0) >= cfg.abs_tol / 10.0) t += 1.0;
  return t;
}

struct QuadratureError : std::runtime_error {
  double residual;
  QuadratureError(const std::string& what, double r) : std::runtime_error(what), residual(r) {}
};

namespace detail {

inline int depth_for(int max_subdivisions) {
  int depth = 1;
  while ((1 << depth) < max_subdivisions && depth < 30) ++depth;
  return depth;
}

// Integral of beta0(t) * g(t) over the truncated line; g is real.
template <class G>
double integrate_against_beta0(G&& g, double scale, const QuadratureConfig& cfg, double* error_out) {
  if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("QuadratureConfig: abs_tol must be positive");
  const double t = effective_truncation(cfg, scale);
  // Below about 1e3 ulps of the integrand scale the error estimate is roundoff,
  // so the tolerance never goes under that floor. Boost tests each subinterval
  // against its own share, and the summed estimate can overshoot slightly, so
  // it is given half the budget.
  const double tol = std::max(cfg.abs_tol, 1e3 * std::numeric_limits<double>::epsilon() * scale);
  const double rel = 0.5 * tol / std::max(scale, 1e-300);
  double error = 0.0;
  auto integrand = [&](double s) { return beta0(s) * g(s); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, -t, t, static_cast<unsigned>(depth_for(cfg.max_subdivisions)), rel, &error);
  if (error_out != nullptr) *error_out = error;
  if (!(error <= tol)) {
    std::ostringstream os;
    os << "alpha quadrature did not converge: residual estimate " << error << " > " << tol;
    throw QuadratureError(os.str(), error);
  }
  return value;
}

}  // namespace detail

/// Integral of beta0 over the truncated line plus the analytic tail; equals 1.
inline double beta0_mass(const QuadratureConfig& cfg = {}) {
  const double t = effective_truncation(cfg, 1.0);
  return detail::integrate_against_beta0([](double) { return 1.0; }, 1.0, cfg, nullptr) + beta0_tail(t);
}

struct AlphaResult {
  double value;
  double residual;   // quadrature error estimate
  double imaginary;  // discarded imaginary part
};

/// alpha(O, P, Q) for PSD O, P, Q, with powers of P taken on its support.
///
/// One eigendecomposition P = V diag(l) V^dag serves every t: with O' = V^dag O V
/// and Q' = V^dag Q V the trace is sum_jk O'_kj Q'_jk sqrt(l_j l_k) e^{i t w_jk}
/// where w_jk = (ln l_j - ln l_k) / 2.
inline AlphaResult alpha_detailed(const HermitianOperator& o, const HermitianOperator& p,
                                  const HermitianOperator& q, const QuadratureConfig& cfg = {}) {
  HermitianOperator::check_same_dim(o, p);
  HermitianOperator::check_same_dim(p, q);
  const EigenSystem es = eig_hermitian(p);
  const double thr = kernel_threshold(p.matrix());
  if (es.values(0) < -thr) throw std::domain_error("alpha: P is not positive semi-definite");

  std::vector<Index> support;
  for (Index i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > thr) support.push_back(i);
  }
  const Matrix op = es.vectors.adjoint() * o.matrix() * es.vectors;
  const Matrix qp = es.vectors.adjoint() * q.matrix() * es.vectors;

  struct Term {
    Complex weight;
    double freq;
  };
  std::vector<Term> terms;
  double scale = 0.0;
  for (Index j : support) {
    for (Index k : support) {
      const double lj = es.values(j), lk = es.values(k);
      const Complex w = op(k, j) * qp(j, k) * std::sqrt(lj * lk);
      if (w == Complex(0.0)) continue;
      terms.push_back({w, 0.5 * (std::log(lj) - std::log(lk))});
      scale += std::abs(w);
    }
  }
  if (terms.empty()) return {0.0, 0.0, 0.0};

  double err_re = 0.0, err_im = 0.0;
  const double re = detail::integrate_against_beta0(
      [&](double t) {
        double s = 0.0;
        for (const auto& term : terms) s += (term.weight * std::polar(1.0, term.freq * t)).real();
        return s;
      },
      scale, cfg, &err_re);
  const double im = detail::integrate_against_beta0(
      [&](double t) {
        double s = 0.0;
        for (const auto& term : terms) s += (term.weight * std::polar(1.0, term.freq * t)).imag();
        return s;
      },
      scale, cfg, &err_im);
  if (std::abs(im) > 1e-9 * std::max(1.0, std::abs(re))) {
    std::ostringstream os;
    os << "alpha: imaginary residue " << im << " exceeds 1e-9 (inputs not Hermitian PSD?)";
    throw std::domain_error(os.str());
  }
  return {re, err_re, im};
}

inline double alpha(const HermitianOperator& o, const HermitianOperator& p, const HermitianOperator& q,
                    const QuadratureConfig& cfg = {}) {
  return alpha_detailed(o, p, q, cfg).value;
}

/// f_{a1,a2}(p) = p log(p + (1-p) a1) + (1-p) log((1-p) + p a2).
inline double f_interp(double p, double a1, double a2) {
  detail::check_probability(p, "f_interp");
  if (a1 < 0.0 || a2 < 0.0) throw std::domain_error("f_interp: negative constant");
  const double first = p > 0.0 ? p * std::log(p + (1.0 - p) * a1) : 0.0;
  const double second = p < 1.0 ? (1.0 - p) * std::log((1.0 - p) + p * a2) : 0.0;
  return first + second;
}

/// f(p) = h_coefficient * h(p) + f_{c1,c2}(p). Every remainder in this module has this shape.
struct RemainderFunction {
  DivergenceKind kind = DivergenceKind::umegaki;
  std::string provenance;
  double h_coefficient = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  /// Umegaki: (1/2)||rho_1 - rho_2||_1. BS: c^_0 and the delta flag.
  double trace_distance = 0.0;
  double c0 = 0.0;
  bool states_equal = false;

  double operator()(double p) const { return h_coefficient * binary_entropy(p) + f_interp(p, c1, c2); }
};

/// Remainder for the Umegaki entropy: h(p) (1/2)||rho_1 - rho_2||_1 + f_{c1,c2}(p) with
/// c1 = alpha(rho_1, sigma_1^{-1}, sigma_2), c2 = alpha(rho_2, sigma_2^{-1}, sigma_1).
/// Requires ker sigma_j to lie in ker rho_j.
inline RemainderFunction umegaki_remainder(const DensityMatrix& rho1, const DensityMatrix& sigma1,
                                           const DensityMatrix& rho2, const DensityMatrix& sigma2,
                                           const QuadratureConfig& cfg = {}) {
  if (!kernel_included(sigma1.op(), rho1.op())) {
    throw std::domain_error("umegaki_remainder: ker sigma_1 not contained in ker rho_1");
  }
  if (!kernel_included(sigma2.op(), rho2.op())) {
    throw std::domain_error("umegaki_remainder: ker sigma_2 not contained in ker rho_2");
  }
  RemainderFunction f;
  f.kind = DivergenceKind::umegaki;
  f.provenance = "umegaki almost concavity";
  f.trace_distance = trace_distance(rho1, rho2);
  f.h_coefficient = f.trace_distance;
  f.c1 = alpha(rho1.op(), pseudo_inverse(sigma1.op()), sigma2.op(), cfg);
  f.c2 = alpha(rho2.op(), pseudo_inverse(sigma2.op()), sigma1.op(), cfg);
  return f;
}

/// Remainder for the BS entropy: h(p)(1 - delta) c^_0 + f_{c^1,c^2}(p) with
/// c^_0 = max ||sigma_j^{-1}||_inf and
/// c^_1 = alpha(rho_1, rho_1^{1/2} sigma_1^{-1} rho_1^{1/2}, rho_1^{-1/2} sigma_2 rho_1^{-1/2}).
///
/// All four states must be full rank. For rank-deficient rho_j the printed
/// constants do not bound the concavity defect (the splitting step that
/// yields p + (1-p) c^_1 needs rho_j invertible).
inline RemainderFunction bs_remainder(const DensityMatrix& rho1, const DensityMatrix& sigma1,
                                      const DensityMatrix& rho2, const DensityMatrix& sigma2,
                                      const QuadratureConfig& cfg = {}) {
  if (!is_full_rank(sigma1.op())) throw std::domain_error("bs_remainder: sigma_1 is rank deficient");
  if (!is_full_rank(sigma2.op())) throw std::domain_error("bs_remainder: sigma_2 is rank deficient");
  if (!is_full_rank(rho1.op())) throw std::domain_error("bs_remainder: rho_1 is rank deficient");
  if (!is_full_rank(rho2.op())) throw std::domain_error("bs_remainder: rho_2 is rank deficient");

  auto constant = [&](const DensityMatrix& rho, const DensityMatrix& own, const DensityMatrix& other) {
    const Matrix rh = sqrt_op(rho.op()).matrix();
    const Matrix rih = inv_sqrt_op(rho.op()).matrix();
    const auto p = HermitianOperator::unchecked(rh * pseudo_inverse(own.op()).matrix() * rh);
    const auto q = HermitianOperator::unchecked(rih * other.matrix() * rih);
    return alpha(rho.op(), p, q, cfg);
  };

  RemainderFunction f;
  f.kind = DivergenceKind::bs;
  f.provenance = "bs almost concavity";
  f.c0 = std::max(1.0 / min_eigenvalue(sigma1.op()), 1.0 / min_eigenvalue(sigma2.op()));
  f.trace_distance = trace_distance(rho1, rho2);
  f.states_equal = f.trace_distance <= kernel_threshold(rho1.matrix());
  f.h_coefficient = f.states_equal ? 0.0 : f.c0;
  f.c1 = constant(rho1, sigma1, sigma2);
  f.c2 = constant(rho2, sigma2, sigma1);
  return f;
}

enum class SpecialCase {
  endpoint,                 // p in {0, 1}
  common_second_argument,   // sigma_1 = sigma_2
  marginal_times_identity,  // sigma_i = (rho_i)_A (x) 1_B
};

/// Simplified remainders for the special cases. The BS entries carry the
/// factor c^_0 = max ||sigma_j^{-1}||_inf, passed in by the caller.
inline RemainderFunction special_case_remainder(DivergenceKind kind, SpecialCase c, double c0 = 1.0) {
  RemainderFunction f;
  f.kind = kind;
  switch (c) {
    case SpecialCase::endpoint:
      f.provenance = "special case: p in {0,1}";
      f.h_coefficient = 0.0;
      break;
    case SpecialCase::common_second_argument:
      f.provenance = "special case: sigma_1 = sigma_2";
      // The BS row reduces to c^_0 h(p): both alpha constants equal 1.
      f.h_coefficient = kind == DivergenceKind::umegaki ? 1.0 : c0;
      break;
    case SpecialCase::marginal_times_identity:
      f.provenance = "special case: sigma_i = (rho_i)_A (x) 1_B";
      f.h_coefficient = kind == DivergenceKind::umegaki ? 1.0 : c0;
      break;
  }
  f.c0 = c0;
  return f;
}

/// 41 uniform points on [0,1] plus {1e-4, 1e-3, 1e-2, 0.99, 0.999}, sorted.
inline std::vector<double> default_p_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 40; ++i) g.push_back(i / 40.0);
  for (double extra : {1e-4, 1e-3, 1e-2, 0.99, 0.999}) g.push_back(extra);
  std::sort(g.begin(), g.end());
  return g;
}

struct StatePair {
  DensityMatrix rho;
  DensityMatrix sigma;
};

/// Concavity defect Delta(p) = D(rho_p||sigma_p) - p D(rho_1||sigma_1) - (1-p) D(rho_2||sigma_2).
inline double concavity_defect(DivergenceKind kind, const StatePair& first, const StatePair& second, double p) {
  const DensityMatrix rp = mix(p, first.rho, second.rho);
  const DensityMatrix sp = mix(p, first.sigma, second.sigma);
  const double mixed = divergence(kind, rp.op(), sp.op()).value;
  const double a = p > 0.0 ? p * divergence(kind, first.rho.op(), first.sigma.op()).value : 0.0;
  const double b = p < 1.0 ? (1.0 - p) * divergence(kind, second.rho.op(), second.sigma.op()).value : 0.0;
  return mixed - a - b;
}

/// Checks -f(p) - tol <= Delta(p) <= tol at every grid point.
inline std::vector<BoundReport> check_almost_concavity(DivergenceKind kind, const StatePair& first,
                                                       const StatePair& second, const std::vector<double>& p_grid,
                                                       const QuadratureConfig& cfg = {}, double tol = 1e-8) {
  const RemainderFunction f = kind == DivergenceKind::umegaki
                                  ? umegaki_remainder(first.rho, first.sigma, second.rho, second.sigma, cfg)
                                  : bs_remainder(first.rho, first.sigma, second.rho, second.sigma, cfg);
  const std::string fp =
      fingerprint({&first.rho.matrix(), &first.sigma.matrix(), &second.rho.matrix(), &second.sigma.matrix()});
  const std::string name = std::string(to_string(kind)) + "_almost_concavity";
  std::vector<BoundReport> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    const double delta = concavity_defect(kind, first, second, p);
    out.push_back(BoundReport::sandwich(name, fp, p, -f(p), delta, 0.0, tol));
  }
  return out;
}

namespace detail {
inline Matrix neg_xlogx(const HermitianOperator& a) {
  return matrix_function(a, [](double x) { return -xlogx(std::max(x, 0.0)); }, Support::full).matrix();
}
}  // namespace detail

/// -A log A <= -p A1 log A1 - (1-p) A2 log A2 + h_{A1,A2}(p) 1 for PSD A1, A2 and A = p A1 + (1-p) A2.
/// measured = smallest eigenvalue of RHS - LHS.
inline BoundReport check_operator_entropy_inequality(const HermitianOperator& a1, const HermitianOperator& a2, double p,
                                double tol = 1e-9) {
  HermitianOperator::check_same_dim(a1, a2);
  const auto a = HermitianOperator::unchecked(p * a1.matrix() + (1.0 - p) * a2.matrix());
  const Matrix lhs = detail::neg_xlogx(a);
  const double hd = distorted_binary_entropy(p, std::max(0.0, a1.trace()), std::max(0.0, a2.trace()));
  const Matrix rhs = p * detail::neg_xlogx(a1) + (1.0 - p) * detail::neg_xlogx(a2) +
                     hd * Matrix::Identity(a1.dim(), a1.dim());
  const double gap = min_eigenvalue(HermitianOperator::unchecked(rhs - lhs));
  return BoundReport::upper("operator_entropy_inequality", fingerprint({&a1.matrix(), &a2.matrix()}), p, -gap,
                            0.0, tol);
}

}  // namespace qcont
