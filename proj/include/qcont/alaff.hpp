#pragma once

// Almost locally affine (ALAFF) functionals and the continuity bound they
// enjoy on perturbed Delta-invariant state sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "qcont/entropies.hpp"
#include "qcont/operator_core.hpp"
#include "qcont/sampling.hpp"

namespace qcont {

using ScalarFunction = std::function<double(double)>;

/// A state set S_0 given by a membership predicate and a sampler.
struct StateDomain {
  std::string name;
  Index dim = 0;
  std::function<bool(const DensityMatrix&)> contains;
  std::function<DensityMatrix(Rng&)> sample;
  /// Perturbing state for the Delta construction; defaults to 1/dim.
  std::optional<DensityMatrix> tau;

  DensityMatrix perturbing_state() const { return tau ? *tau : DensityMatrix::maximally_mixed(dim); }
};

inline StateDomain all_states(Index dim) {
  StateDomain d;
  d.name = "all_states";
  d.dim = dim;
  d.contains = [dim](const DensityMatrix& r) { return r.dim() == dim; };
  d.sample = [dim](Rng& rng) { return sample_mixed_rank(dim, rng); };
  return d;
}

/// States with smallest eigenvalue >= floor. Perturbed Delta-invariant for t >= dim * floor.
inline StateDomain min_eigenvalue_domain(Index dim, double floor) {
  StateDomain d;
  d.name = "min_eigenvalue_domain";
  d.dim = dim;
  d.contains = [dim, floor](const DensityMatrix& r) {
    return r.dim() == dim && min_eigenvalue(r.op()) >= floor - 1e-12;
  };
  d.sample = [dim, floor](Rng& rng) { return sample_min_eig_floor(dim, floor, rng); };
  return d;
}

struct AlaffFunction {
  std::string name;
  std::function<double(const DensityMatrix&)> evaluate;
  ScalarFunction a_f;
  ScalarFunction b_f;
  StateDomain domain;
  double t = 0.0;
  /// Known C_f^t; empty means it has to be estimated.
  std::optional<double> c_f_t;
};

inline double E_f(const AlaffFunction& f, double p) {
  detail::check_probability(p, "E_f");
  return f.a_f(p) + f.b_f(p);
}

namespace detail {

// Golden-section maximization of g on [lo, hi].
inline std::pair<double, double> golden_max(const ScalarFunction& g, double lo, double hi, int iters = 60) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int i = 0; i < iters && b - a > 1e-15; ++i) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + r * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - r * (b - a);
      g1 = g(x1);
    }
  }
  return g1 > g2 ? std::pair{x1, g1} : std::pair{x2, g2};
}

}  // namespace detail

/// E^max(p) = (1-p) max_{0<=s<=p} E(s)/(1-s), via a 1024-point grid on [0, p]
/// and two golden-section refinements around the grid argmax.
inline double E_f_max(const ScalarFunction& e, double p) {
  if (!(p >= 0.0) || p >= 1.0) {
    std::ostringstream os;
    os << "E_f_max: p must lie in [0, 1), got " << p;
    throw std::domain_error(os.str());
  }
  if (p == 0.0) return e(0.0);
  auto ratio = [&](double s) { return e(s) / (1.0 - s); };
  constexpr int kGrid = 1024;
  double best = ratio(0.0);
  int arg = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double v = ratio(p * i / kGrid);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  double step = p / kGrid;
  double centre = p * arg / kGrid;
  for (int round = 0; round < 2; ++round) {
    const double lo = std::max(0.0, centre - step), hi = std::min(p, centre + step);
    const auto [x, v] = detail::golden_max(ratio, lo, hi);
    if (v > best) {
      best = v;
      centre = x;
    }
    step /= 8.0;
  }
  return (1.0 - p) * best;
}

inline double E_f_max(const AlaffFunction& f, double p) {
  return E_f_max([&f](double s) { return E_f(f, s); }, p);
}

/// C eps/(1-t) + ((1-t+eps)/(1-t)) E^max(eps/(1-t+eps)).
inline double continuity_bound(double eps, double c_f_t, double t, const ScalarFunction& e) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    if (eps == 0.0) return 0.0;
    throw std::domain_error("continuity_bound: epsilon must lie in (0, 1]");
  }
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("continuity_bound: t must lie in [0, 1)");
  if (!std::isfinite(c_f_t)) throw std::domain_error("continuity_bound: C_f^t is not finite, bound unavailable");
  const double s = 1.0 - t;
  return c_f_t * eps / s + ((s + eps) / s) * E_f_max(e, eps / (s + eps));
}

inline double continuity_bound(double eps, const AlaffFunction& f) {
  if (!f.c_f_t) throw std::domain_error("continuity_bound: " + f.name + " has no C_f^t; estimate it first");
  return continuity_bound(eps, *f.c_f_t, f.t, [&f](double s) { return E_f(f, s); });
}

struct DeltaStates {
  DensityMatrix plus;
  DensityMatrix minus;
  double epsilon;
};

/// gamma_+- = t tau + (1-t) [rho - sigma]_+- / eps with eps = (1/2)||rho - sigma||_1.
inline DeltaStates delta_states(const DensityMatrix& rho, const DensityMatrix& sigma, const DensityMatrix& tau,
                                double t) {
  HermitianOperator::check_same_dim(rho, sigma);
  HermitianOperator::check_same_dim(rho, tau);
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("delta_states: t must lie in [0, 1)");
  const auto parts = jordan_decomposition(rho.op() - sigma.op());
  const double eps = 0.5 * (parts.positive.trace() + parts.negative.trace());
  if (eps <= kernel_threshold(rho.matrix())) throw std::domain_error("delta_states: rho equals sigma");
  auto build = [&](const HermitianOperator& part) {
    const Matrix m = t * tau.matrix() + (1.0 - t) * part.matrix() / part.trace();
    return DensityMatrix(HermitianOperator::unchecked(m));
  };
  return {build(parts.positive), build(parts.negative), eps};
}

struct OmegaPair {
  /// (1-t)/(1-t+eps) rho + eps/(1-t+eps) gamma_-
  Matrix via_rho;
  /// (1-t)/(1-t+eps) sigma + eps/(1-t+eps) gamma_+
  Matrix via_sigma;
  double max_entry_gap() const { return max_abs(via_rho - via_sigma); }
};

inline OmegaPair omega_representations(const DensityMatrix& rho, const DensityMatrix& sigma,
                                       const DensityMatrix& tau, double t) {
  const DeltaStates d = delta_states(rho, sigma, tau, t);
  const double w = (1.0 - t) / (1.0 - t + d.epsilon);
  return {w * rho.matrix() + (1.0 - w) * d.minus.matrix(), w * sigma.matrix() + (1.0 - w) * d.plus.matrix()};
}

inline DensityMatrix omega_interpolation(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const DensityMatrix& tau, double t) {
  return DensityMatrix(HermitianOperator(omega_representations(rho, sigma, tau, t).via_rho));
}

struct CEstimate {
  double value = 0.0;  // lower estimate of C_f^t
  std::size_t pairs_used = 0;
  std::size_t rejected = 0;  // gamma pairs outside the domain
};

/// Running max of |f(gamma_+) - f(gamma_-)| over Delta pairs built from sampled
/// (rho, sigma), which sit at trace distance exactly 1 - t. A lower estimate of
/// the supremum, never the supremum itself. Trial i uses trial_seed(seed, i),
/// so a longer run extends a shorter one.
inline CEstimate estimate_C_f_t(const AlaffFunction& f, std::size_t trials, std::uint64_t seed) {
  if (!f.domain.sample) throw std::invalid_argument("estimate_C_f_t: domain " + f.domain.name + " has no sampler");
  const DensityMatrix tau = f.domain.perturbing_state();
  CEstimate est;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(trial_seed(seed, i));
    const DensityMatrix rho = f.domain.sample(rng);
    const DensityMatrix sigma = f.domain.sample(rng);
    if (trace_distance(rho, sigma) <= 1e-9) continue;
    const DeltaStates d = delta_states(rho, sigma, tau, f.t);
    if (f.domain.contains && (!f.domain.contains(d.plus) || !f.domain.contains(d.minus))) {
      ++est.rejected;
      continue;
    }
    est.value = std::max(est.value, std::abs(f.evaluate(d.plus) - f.evaluate(d.minus)));
    ++est.pairs_used;
  }
  if (trials > 0 && est.pairs_used == 0) {
    throw std::runtime_error("estimate_C_f_t: sampler produced no distance-(1-t) pair inside " + f.domain.name);
  }
  return est;
}

struct EnvelopeDiagnostic {
  bool ok = true;
  std::string message;
};

/// Grid spot check: envelopes vanish at 0, are nondecreasing on [0, 1/2] and finite.
inline EnvelopeDiagnostic check_envelopes(const AlaffFunction& f, int points = 201) {
  for (const auto* g : {&f.a_f, &f.b_f}) {
    const char* which = g == &f.a_f ? "a_f" : "b_f";
    if (std::abs((*g)(0.0)) > 1e-12) return {false, std::string(which) + "(0) != 0"};
    double prev = (*g)(0.0);
    for (int i = 1; i < points; ++i) {
      const double p = static_cast<double>(i) / (points - 1);
      const double v = (*g)(p);
      if (!std::isfinite(v)) return {false, std::string(which) + " not finite"};
      if (p <= 0.5 && v < prev - 1e-12) return {false, std::string(which) + " decreasing on [0, 1/2]"};
      prev = v;
    }
  }
  return {};
}

/// H(A|B) on bipartite states: concave, and almost convex with defect h(p).
/// C_f^0 = 2 log d_A.
inline AlaffFunction conditional_entropy_alaff(const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  AlaffFunction f;
  f.name = "conditional_entropy";
  f.evaluate = [layout](const DensityMatrix& r) { return conditional_entropy(r, layout, layout.labels()[1]); };
  f.a_f = [](double p) { return binary_entropy(p); };
  f.b_f = [](double) { return 0.0; };
  f.domain = all_states(layout.total_dim());
  f.t = 0.0;
  f.c_f_t = 2.0 * std::log(static_cast<double>(layout.dims()[0]));
  return f;
}

/// I(A:B) on bipartite states: defects h(p) on both sides, C_f^0 = 2 log min{d_A, d_B}.
inline AlaffFunction mutual_information_alaff(const SubsystemLayout& layout) {
  detail::check_bipartite(layout);
  AlaffFunction f;
  f.name = "mutual_information";
  f.evaluate = [layout](const DensityMatrix& r) { return mutual_information(r, layout); };
  f.a_f = [](double p) { return binary_entropy(p); };
  f.b_f = [](double p) { return binary_entropy(p); };
  f.domain = all_states(layout.total_dim());
  f.t = 0.0;
  f.c_f_t = 2.0 * std::log(static_cast<double>(std::min(layout.dims()[0], layout.dims()[1])));
  return f;
}

}  // namespace qcont
