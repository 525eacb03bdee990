#pragma once

// Scalar entropic quantities. All logarithms are natural (nats).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcont/operator_core.hpp"

namespace qcont {

/// A relative-entropy value in nats, possibly +infinity.
struct EntropyValue {
  double value = 0.0;
  /// Kernel inclusion holds only marginally: the reference has eigenvalues
  /// just above the kernel threshold, or the first argument leaks onto its
  /// kernel below the inclusion tolerance.
  bool near_singular = false;
  /// A BS quantity whose reference marginal is rank deficient; the value is
  /// computed with pseudo-inverses but lies outside the full-rank domain.
  bool singular_reference = false;

  bool finite() const { return std::isfinite(value); }
  static EntropyValue infinite() { return {std::numeric_limits<double>::infinity(), false, false}; }
};

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline void check_probability(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error(std::string(who) + ": argument " + std::to_string(p) + " outside [0,1]");
  }
}

// Spectral data of a reference operator, shared by the kernel test, the
// logarithm/inverse and the near-singular flag.
struct ReferenceSpectrum {
  EigenSystem es;
  double thr;

  explicit ReferenceSpectrum(const HermitianOperator& sigma)
      : es(eig_hermitian(sigma)), thr(kernel_threshold(sigma.matrix())) {}

  template <class Fn>
  Matrix apply(Fn&& fn) const {
    RVector out(es.values.size());
    for (Index i = 0; i < out.size(); ++i) out(i) = es.values(i) > thr ? fn(es.values(i)) : 0.0;
    return reconstruct(es, out);
  }

  double leakage(const HermitianOperator& rho) const {
    const Matrix k = Matrix::Identity(es.vectors.rows(), es.vectors.rows()) -
                     apply([](double) { return 1.0; });
    return max_abs(k * rho.matrix() * k);
  }

  // Kernel inclusion holds only marginally: eigenvalues just above the
  // threshold, or leakage that is small but above roundoff.
  bool near_singular(double leak) const {
    for (Index i = 0; i < es.values.size(); ++i) {
      if (es.values(i) > thr && es.values(i) <= 1e4 * thr) return true;
    }
    return leak > 1e-3 * kStateTol;
  }
};
}  // namespace detail

inline double von_neumann_entropy(const DensityMatrix& rho) {
  const double thr = kernel_threshold(rho.matrix());
  const RVector v = eig_hermitian(rho.op()).values;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) > thr) s -= v(i) * std::log(v(i));
  }
  return std::max(0.0, s);
}

inline double binary_entropy(double p) {
  detail::check_probability(p, "binary_entropy");
  return -detail::xlogx(p) - detail::xlogx(1.0 - p);
}

/// -p log(p) tr[A1] - (1-p) log(1-p) tr[A2].
inline double distorted_binary_entropy(double p, double trace_a1, double trace_a2) {
  detail::check_probability(p, "distorted_binary_entropy");
  if (trace_a1 < 0.0 || trace_a2 < 0.0) {
    throw std::domain_error("distorted_binary_entropy: negative trace");
  }
  return -detail::xlogx(p) * trace_a1 - detail::xlogx(1.0 - p) * trace_a2;
}

/// r(eps) = (1 + eps) h(eps / (1 + eps)).
inline double r_epsilon(double eps) {
  detail::check_probability(eps, "r_epsilon");
  return (1.0 + eps) * binary_entropy(eps / (1.0 + eps));
}

/// g_d(p) = (d / p^{1/d}) h(p) - log(1 - p^{1/d}), with g_d(0) = 0.
inline double g_d(double p, int d) {
  if (d < 2) throw std::domain_error("g_d: d must be at least 2");
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("g_d: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  const double root = std::pow(p, 1.0 / d);
  return d / root * binary_entropy(p) - std::log1p(-root);
}

/// Umegaki relative entropy tr[rho (log rho - log sigma)]; +inf unless ker sigma is in ker rho.
/// sigma may be any PSD operator (e.g. 1_A (x) rho_B).
inline EntropyValue umegaki(const HermitianOperator& rho, const HermitianOperator& sigma) {
  HermitianOperator::check_same_dim(rho, sigma);
  const detail::ReferenceSpectrum ref(sigma);
  const double leak = ref.leakage(rho);
  if (leak > kStateTol) return EntropyValue::infinite();
  const Matrix diff = log_op(rho).matrix() - ref.apply([](double x) { return std::log(x); });
  EntropyValue v;
  v.value = (rho.matrix() * diff).trace().real();
  v.near_singular = ref.near_singular(leak);
  return v;
}

/// Belavkin-Staszewski entropy tr[rho log(rho^{1/2} sigma^{-1} rho^{1/2})], inverse on supp sigma.
inline EntropyValue bs_entropy(const HermitianOperator& rho, const HermitianOperator& sigma) {
  HermitianOperator::check_same_dim(rho, sigma);
  const detail::ReferenceSpectrum ref(sigma);
  const double leak = ref.leakage(rho);
  if (leak > kStateTol) return EntropyValue::infinite();
  const Matrix rh = sqrt_op(rho).matrix();
  const auto inner = HermitianOperator::unchecked(rh * ref.apply([](double x) { return 1.0 / x; }) * rh);
  EntropyValue v;
  v.value = (rho.matrix() * log_op(inner).matrix()).trace().real();
  v.near_singular = ref.near_singular(leak);
  return v;
}

/// Alternative form tr[sigma X log X], X = sigma^{-1/2} rho sigma^{-1/2}; sigma must be full rank.
inline double bs_entropy_sigma_form(const HermitianOperator& rho, const HermitianOperator& sigma) {
  HermitianOperator::check_same_dim(rho, sigma);
  if (!is_full_rank(sigma)) {
    throw std::domain_error("bs_entropy_sigma_form: sigma must be full rank");
  }
  const Matrix s = inv_sqrt_op(sigma).matrix();
  const auto x = HermitianOperator::unchecked(s * rho.matrix() * s);
  const auto xlogx = matrix_function(x, [](double t) { return detail::xlogx(t); }, Support::full);
  return (sigma.matrix() * xlogx.matrix()).trace().real();
}

// ---------------------------------------------------------------------------
// Derived quantities. Subsystems are named by layout labels.

namespace detail {
inline std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// (rho_{ab}, 1_a (x) rho_b) on the factors a u b.
struct ConditionalPair {
  HermitianOperator joint;
  HermitianOperator reference;
  bool reference_full_rank;
};

inline ConditionalPair conditional_pair(const DensityMatrix& rho, const SubsystemLayout& layout,
                                        const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
  layout.check_dim(rho.dim());
  const auto ab = join(a, b);
  const auto sub = layout.restrict_to(ab);
  const HermitianOperator joint = partial_trace(rho.op(), layout, ab);
  const HermitianOperator rb = partial_trace(rho.op(), layout, b);
  return {joint, embed(rb, sub, b), is_full_rank(rb)};
}

inline std::vector<std::string> complement(const SubsystemLayout& layout, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const auto& l : layout.labels()) {
    if (std::find(b.begin(), b.end(), l) == b.end()) out.push_back(l);
  }
  return out;
}

inline void check_bipartite(const SubsystemLayout& layout) {
  if (layout.size() != 2) throw std::invalid_argument("expected a bipartite layout");
}
inline void check_tripartite(const SubsystemLayout& layout) {
  if (layout.size() != 3) throw std::invalid_argument("expected a tripartite layout");
}
}  // namespace detail

/// H(a|b) = -D(rho_ab || 1_a (x) rho_b).
inline double conditional_entropy(const DensityMatrix& rho, const SubsystemLayout& layout,
                                  const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto pair = detail::conditional_pair(rho, layout, a, b);
  return -umegaki(pair.joint, pair.reference).value;
}

/// H(rest|cond_on) for the factors other than `cond_on`.
inline double conditional_entropy(const DensityMatrix& rho, const SubsystemLayout& layout,
                                  const std::string& cond_on) {
  return conditional_entropy(rho, layout, detail::complement(layout, {cond_on}), {cond_on});
}

/// I(a:b) = D(rho_ab || rho_a (x) rho_b).
inline double mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout,
                                 const std::vector<std::string>& a, const std::vector<std::string>& b) {
  layout.check_dim(rho.dim());
  const auto ab = detail::join(a, b);
  const auto sub = layout.restrict_to(ab);
  const HermitianOperator joint = partial_trace(rho.op(), layout, ab);
  const HermitianOperator product = HermitianOperator::unchecked(
      embed(partial_trace(rho.op(), layout, a), sub, a).matrix() *
      embed(partial_trace(rho.op(), layout, b), sub, b).matrix());
  return umegaki(joint, product).value;
}

/// I(A:B) for a bipartite layout.
inline double mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  return mutual_information(rho, layout, {layout.labels()[0]}, {layout.labels()[1]});
}

/// I(a:b|c) = H(a|c) - H(a|bc).
inline double conditional_mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout,
                                             const std::string& a, const std::string& b,
                                             const std::string& c) {
  return conditional_entropy(rho, layout, {a}, {c}) - conditional_entropy(rho, layout, {a}, {b, c});
}

/// I(A:B|C) for a tripartite layout, labels taken in layout order.
inline double conditional_mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout) {
  detail::check_tripartite(layout);
  const auto& l = layout.labels();
  return conditional_mutual_information(rho, layout, l[0], l[1], l[2]);
}

/// H^(a|b) = -D^(rho_ab || 1_a (x) rho_b); flagged when rho_b is rank deficient.
inline EntropyValue bs_conditional_entropy(const DensityMatrix& rho, const SubsystemLayout& layout,
                                           const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
  const auto pair = detail::conditional_pair(rho, layout, a, b);
  EntropyValue v = bs_entropy(pair.joint, pair.reference);
  v.value = -v.value;
  v.singular_reference = !pair.reference_full_rank;
  return v;
}

inline EntropyValue bs_conditional_entropy(const DensityMatrix& rho, const SubsystemLayout& layout,
                                           const std::string& cond_on) {
  return bs_conditional_entropy(rho, layout, detail::complement(layout, {cond_on}), {cond_on});
}

/// I^(a:b) = D^(rho_ab || rho_a (x) rho_b).
inline EntropyValue bs_mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout,
                                          const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  layout.check_dim(rho.dim());
  const auto ab = detail::join(a, b);
  const auto sub = layout.restrict_to(ab);
  const HermitianOperator ra = partial_trace(rho.op(), layout, a);
  const HermitianOperator rb = partial_trace(rho.op(), layout, b);
  const HermitianOperator product =
      HermitianOperator::unchecked(embed(ra, sub, a).matrix() * embed(rb, sub, b).matrix());
  EntropyValue v = bs_entropy(partial_trace(rho.op(), layout, ab), product);
  v.singular_reference = !is_full_rank(ra) || !is_full_rank(rb);
  return v;
}

inline EntropyValue bs_mutual_information(const DensityMatrix& rho, const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  return bs_mutual_information(rho, layout, {layout.labels()[0]}, {layout.labels()[1]});
}

/// I^(a:b|c) = H^(a|c) - H^(a|bc).
inline EntropyValue bs_cmi(const DensityMatrix& rho, const SubsystemLayout& layout, const std::string& a,
                           const std::string& b, const std::string& c) {
  const EntropyValue hc = bs_conditional_entropy(rho, layout, {a}, {c});
  const EntropyValue hbc = bs_conditional_entropy(rho, layout, {a}, {b, c});
  EntropyValue v;
  v.value = hc.value - hbc.value;
  v.near_singular = hc.near_singular || hbc.near_singular;
  v.singular_reference = hc.singular_reference || hbc.singular_reference;
  return v;
}

inline EntropyValue bs_cmi(const DensityMatrix& rho, const SubsystemLayout& layout) {
  detail::check_tripartite(layout);
  const auto& l = layout.labels();
  return bs_cmi(rho, layout, l[0], l[1], l[2]);
}

}  // namespace qcont
