#pragma once

// Closed-form continuity bounds for relative entropies and the entropic
// quantities derived from them. Each function checks its preconditions and
// returns the bound value; measuring the left-hand side is left to callers.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcont/entropies.hpp"
#include "qcont/operator_core.hpp"

namespace qcont {

namespace detail {
inline void check_epsilon(double eps, const char* who) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << who << ": epsilon must lie in [0, 1], got " << eps;
    throw std::domain_error(os.str());
  }
}
inline double log_d(Index d) {
  if (d < 1) throw std::domain_error("dimension must be positive");
  return std::log(static_cast<double>(d));
}
}  // namespace detail

struct DivergenceBound {
  double epsilon;
  double m_tilde;
  double linear;     // eps log(1/m~) + r(eps)
  double sqrt_form;  // (1 + log(1/m~)/sqrt 2) sqrt(2 eps)
};

inline double divergence_bound_linear(double eps, double m_tilde) {
  detail::check_epsilon(eps, "divergence_bound_linear");
  return eps * std::log(1.0 / m_tilde) + r_epsilon(eps);
}

inline double divergence_bound_sqrt(double eps, double m_tilde) {
  detail::check_epsilon(eps, "divergence_bound_sqrt");
  return (1.0 + std::log(1.0 / m_tilde) / std::sqrt(2.0)) * std::sqrt(2.0 * eps);
}

/// Bounds on D(rho||sigma) in terms of eps = (1/2)||rho - sigma||_1 and the
/// smallest nonzero eigenvalue m~ of sigma.
inline DivergenceBound divergence_bound(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!kernel_included(sigma.op(), rho.op())) {
    throw std::domain_error("divergence_bound: ker sigma is not contained in ker rho");
  }
  const double eps = trace_distance(rho, sigma);
  const double m = min_nonzero_eigenvalue(sigma.op());
  return {eps, m, divergence_bound_linear(eps, m), divergence_bound_sqrt(eps, m)};
}

/// |H_rho(A|B) - H_sigma(A|B)| <= 2 eps log d_A + r(eps).
inline double ce_bound(double eps, Index d_a) {
  detail::check_epsilon(eps, "ce_bound");
  return 2.0 * eps * detail::log_d(d_a) + r_epsilon(eps);
}

/// |I_rho(A:B) - I_sigma(A:B)| <= 2 eps log min{d_A, d_B} + 2 r(eps).
inline double mi_bound(double eps, Index d_a, Index d_b) {
  detail::check_epsilon(eps, "mi_bound");
  return 2.0 * eps * detail::log_d(std::min(d_a, d_b)) + 2.0 * r_epsilon(eps);
}

/// Same shape as mi_bound. The two dimensions are those of the pair named by
/// the caller: (d_A, d_B) for I(A:B|C) read off the MI row, or (d_A, d_C) for
/// the reading that matches the Markov-chain upper bound.
inline double cmi_bound(double eps, Index d_first, Index d_second) {
  detail::check_epsilon(eps, "cmi_bound");
  return 2.0 * eps * detail::log_d(std::min(d_first, d_second)) + 2.0 * r_epsilon(eps);
}

namespace detail {
inline void check_m_tilde(double m, const char* who) {
  if (!(m > 0.0 && m <= 1.0 - 1e-6)) {
    std::ostringstream os;
    os << who << ": m~ must lie in (0, 1 - 1e-6], got " << m;
    throw std::domain_error(os.str());
  }
}

inline void check_domination(const DensityMatrix& rho, const DensityMatrix& sigma, double m,
                             const std::string& rho_name, const std::string& sigma_name, const char* who) {
  if (!kernel_included(sigma.op(), rho.op())) {
    throw std::domain_error(std::string(who) + ": ker " + sigma_name + " not contained in ker " + rho_name);
  }
  const auto scaled = HermitianOperator::unchecked(m * rho.matrix());
  if (!psd_dominates(sigma.op(), scaled, 1e-12)) {
    std::ostringstream os;
    os << who << ": m~ " << rho_name << " <= " << sigma_name << " fails (smallest eigenvalue of " << sigma_name
       << " - m~ " << rho_name << " is " << min_eigenvalue(sigma.op() - scaled) << ")";
    throw std::domain_error(os.str());
  }
}
}  // namespace detail

/// |D(rho||sigma_1) - D(rho||sigma_2)| <= (3 log^2(1/m~) / (1 - m~)) ||sigma_1 - sigma_2||_1^{1/2}
/// whenever m~ rho <= sigma_j for j = 1, 2.
inline double second_input_bound(const DensityMatrix& rho, const DensityMatrix& sigma1, const DensityMatrix& sigma2,
                                 double m_tilde) {
  detail::check_m_tilde(m_tilde, "second_input_bound");
  detail::check_domination(rho, sigma1, m_tilde, "rho", "sigma_1", "second_input_bound");
  detail::check_domination(rho, sigma2, m_tilde, "rho", "sigma_2", "second_input_bound");
  const double l = std::log(1.0 / m_tilde);
  return 3.0 * l * l / (1.0 - m_tilde) * std::sqrt(trace_norm(sigma1.op() - sigma2.op()));
}

/// |D(rho_1||sigma_1) - D(rho_2||sigma_2)| <=
///   (1 + log(1/m~)/sqrt 2) ||rho_1 - rho_2||_1^{1/2} + (5 log^2(1/m~) / (sqrt 2 (1 - m~))) ||sigma_1 - sigma_2||_1^{1/2}
/// with m~ rho_i <= sigma_j for every i, j.
inline double two_input_bound(const DensityMatrix& rho1, const DensityMatrix& rho2, const DensityMatrix& sigma1,
                              const DensityMatrix& sigma2, double m_tilde) {
  detail::check_m_tilde(m_tilde, "two_input_bound");
  detail::check_domination(rho1, sigma1, m_tilde, "rho_1", "sigma_1", "two_input_bound");
  detail::check_domination(rho1, sigma2, m_tilde, "rho_1", "sigma_2", "two_input_bound");
  detail::check_domination(rho2, sigma1, m_tilde, "rho_2", "sigma_1", "two_input_bound");
  detail::check_domination(rho2, sigma2, m_tilde, "rho_2", "sigma_2", "two_input_bound");
  const double l = std::log(1.0 / m_tilde);
  return (1.0 + l / std::sqrt(2.0)) * std::sqrt(trace_norm(rho1.op() - rho2.op())) +
         5.0 * l * l / (std::sqrt(2.0) * (1.0 - m_tilde)) * std::sqrt(trace_norm(sigma1.op() - sigma2.op()));
}

/// C sqrt(eps) / (m (1/d_H - m)) for the BS conditional entropy and mutual
/// information on states with smallest eigenvalue >= m. C has no default.
inline double bs_quantity_bound(double eps, double m, Index d_h, double c) {
  detail::check_epsilon(eps, "bs_quantity_bound");
  const double inv_d = 1.0 / static_cast<double>(d_h);
  if (!(m > 0.0 && m < inv_d)) {
    std::ostringstream os;
    os << "bs_quantity_bound: m must lie in (0, 1/d_H) = (0, " << inv_d << "), got " << m;
    throw std::domain_error(os.str());
  }
  return c * std::sqrt(eps) / (m * (inv_d - m));
}

/// Largest m with m rho <= sigma: 1 / lambda_max(sigma^{-1/2} rho sigma^{-1/2}),
/// inverse taken on supp sigma. Requires ker sigma in ker rho.
inline double max_domination_constant(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!kernel_included(sigma.op(), rho.op())) {
    throw std::domain_error("max_domination_constant: ker sigma not contained in ker rho");
  }
  const Matrix s = inv_sqrt_op(sigma.op()).matrix();
  const double top = max_eigenvalue(HermitianOperator::unchecked(s * rho.matrix() * s));
  return 1.0 / top;
}

/// 0.9 times the largest admissible m~ over all (rho_i, sigma_j), capped at 1 - 1e-6.
inline double campaign_m_tilde(std::initializer_list<const DensityMatrix*> rhos,
                               std::initializer_list<const DensityMatrix*> sigmas) {
  double m = 1.0;
  for (const auto* r : rhos) {
    for (const auto* s : sigmas) m = std::min(m, max_domination_constant(*r, *s));
  }
  return std::min(0.9 * m, 1.0 - 1e-6);
}

}  // namespace qcont
