#pragma once

// Seeded verification campaigns. A check draws random inputs, evaluates one
// inequality and returns a BoundReport; run_campaign runs it `trials` times
// on a thread pool, keeping the reports in trial order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcont/alaff.hpp"
#include "qcont/almost_concavity.hpp"
#include "qcont/applications.hpp"
#include "qcont/bound_catalog.hpp"
#include "qcont/entropies.hpp"
#include "qcont/operator_core.hpp"
#include "qcont/report.hpp"
#include "qcont/sampling.hpp"

namespace qcont {

enum class SamplerKind { ginibre, ginibre_rank_k, pure, min_eig_floor, identical };

inline const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::ginibre: return "ginibre";
    case SamplerKind::ginibre_rank_k: return "ginibre_rank_k";
    case SamplerKind::pure: return "pure";
    case SamplerKind::min_eig_floor: return "min_eig_floor";
    case SamplerKind::identical: return "identical";
  }
  return "?";
}

inline SamplerKind sampler_from_string(const std::string& s) {
  for (auto k : {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure, SamplerKind::min_eig_floor,
                 SamplerKind::identical}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown sampler " + s);
}

struct CampaignConfig {
  std::string check_name;
  /// Factor dimensions; empty selects the check's default.
  std::vector<Index> dims;
  std::size_t trials = 100;
  std::uint64_t seed = 42;
  /// Overrides the check's default tolerance.
  std::optional<double> tolerance;
  std::optional<SamplerKind> sampler;
  /// Rank for ginibre_rank_k; 0 draws a uniform rank per state.
  Index rank = 0;
  /// Floor for min_eig_floor and the BS shape checks.
  double floor = 0.05;
  /// The unspecified absolute constant of the BS bounds. Required by those checks.
  std::optional<double> bs_constant;
  unsigned threads = 0;
};

class TrialContext {
 public:
  TrialContext(std::uint64_t seed, const CampaignConfig& cfg, SamplerKind sampler, double tol)
      : rng(seed), cfg_(cfg), sampler_(sampler), tol_(tol) {}

  Rng rng;

  double tol() const { return tol_; }
  const CampaignConfig& config() const { return cfg_; }

  /// One state from the configured sampler.
  DensityMatrix draw(Index dim) {
    switch (sampler_) {
      case SamplerKind::ginibre:
      case SamplerKind::identical:
        return sample_ginibre_state(dim, dim, rng);
      case SamplerKind::ginibre_rank_k: {
        const Index r = cfg_.rank > 0 ? std::min(cfg_.rank, dim) : 0;
        return r > 0 ? sample_ginibre_state(dim, r, rng) : sample_mixed_rank(dim, rng);
      }
      case SamplerKind::pure:
        return sample_pure(dim, rng);
      case SamplerKind::min_eig_floor:
        return sample_min_eig_floor(dim, cfg_.floor, rng);
    }
    throw std::logic_error("unreachable sampler");
  }

  /// Two states; equal under the identical sampler.
  std::pair<DensityMatrix, DensityMatrix> draw_pair(Index dim) {
    DensityMatrix a = draw(dim);
    if (sampler_ == SamplerKind::identical) return {a, a};
    DensityMatrix b = draw(dim);
    return {std::move(a), std::move(b)};
  }

  DensityMatrix full_rank(Index dim) { return sample_ginibre_state(dim, dim, rng); }
  DensityMatrix mixed_rank(Index dim) { return sample_mixed_rank(dim, rng); }

  double pick(std::initializer_list<double> values) {
    const auto i = static_cast<std::size_t>(rng.next() % values.size());
    return *(values.begin() + static_cast<std::ptrdiff_t>(i));
  }

 private:
  const CampaignConfig& cfg_;
  SamplerKind sampler_;
  double tol_;
};

using TrialFunction = std::function<BoundReport(TrialContext&, const std::vector<Index>&)>;

struct Check {
  std::string name;
  std::string inequality;
  /// Number of tensor factors the check expects (1 = single system).
  std::size_t factors = 1;
  std::vector<Index> default_dims;
  /// First entry is the default.
  std::vector<SamplerKind> samplers = {SamplerKind::ginibre};
  double tolerance = 1e-8;
  /// Bound is linear in the user-supplied BS constant.
  bool needs_bs_constant = false;
  TrialFunction trial;
};

namespace detail {

inline BoundReport worst_of(std::vector<BoundReport> reports) {
  if (reports.empty()) throw std::logic_error("worst_of: no reports");
  auto it = std::min_element(reports.begin(), reports.end(),
                             [](const BoundReport& a, const BoundReport& b) { return a.margin < b.margin; });
  return *it;
}

inline BoundReport named(BoundReport r, const std::string& name) {
  r.bound_name = name;
  return r;
}

inline Index prod(const std::vector<Index>& d) {
  Index n = 1;
  for (Index x : d) n *= x;
  return n;
}

// Defect of D(rho_p || sigma_p) for unnormalized second arguments.
inline double operator_defect(DivergenceKind kind, const DensityMatrix& r1, const HermitianOperator& s1,
                              const DensityMatrix& r2, const HermitianOperator& s2, double p) {
  const DensityMatrix rp = mix(p, r1, r2);
  const auto sp = HermitianOperator::unchecked(p * s1.matrix() + (1.0 - p) * s2.matrix());
  const double a = p > 0.0 ? p * divergence(kind, r1.op(), s1).value : 0.0;
  const double b = p < 1.0 ? (1.0 - p) * divergence(kind, r2.op(), s2).value : 0.0;
  return divergence(kind, rp.op(), sp).value - a - b;
}

inline DensityMatrix commuting_partner(const DensityMatrix& basis_source, Rng& rng) {
  // A state diagonal in the eigenbasis of basis_source.
  const EigenSystem es = eig_hermitian(basis_source.op());
  RVector w(basis_source.dim());
  for (Index i = 0; i < w.size(); ++i) w(i) = 0.05 + rng.uniform();
  w /= w.sum();
  return DensityMatrix(HermitianOperator::unchecked(reconstruct(es, w)));
}

inline double bs_shape(double eps, double m, Index d) {
  return std::sqrt(eps) / (m * (1.0 / static_cast<double>(d) - m));
}

// sigma at trace distance exactly eps from rho along a random direction, staying
// inside the floored set when the direction state is floored.
inline DensityMatrix at_distance(const DensityMatrix& rho, const DensityMatrix& toward, double eps) {
  const double full = trace_distance(rho, toward);
  const double w = std::min(1.0, eps / full);
  return mix(1.0 - w, rho, toward);
}

}  // namespace detail

inline const std::vector<Check>& check_registry() {
  using detail::worst_of;
  static const std::vector<Check> registry = [] {
    std::vector<Check> c;
    const auto all_samplers = std::vector<SamplerKind>{SamplerKind::ginibre, SamplerKind::ginibre_rank_k,
                                                       SamplerKind::pure, SamplerKind::min_eig_floor,
                                                       SamplerKind::identical};

    c.push_back({"umegaki_nonneg", "D(rho||sigma) >= 0", 1, {3}, all_samplers, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   auto [rho, sigma] = ctx.draw_pair(d[0]);
                   const double v = umegaki(rho.op(), sigma.op()).value;
                   return BoundReport::upper("umegaki_nonneg", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             trace_distance(rho, sigma), -v, 0.0, ctx.tol());
                 }});

    c.push_back({"bs_dominates_umegaki", "D^(rho||sigma) >= D(rho||sigma)", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure, SamplerKind::min_eig_floor},
                 1e-9, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix sigma = ctx.full_rank(d[0]);
                   return BoundReport::upper("bs_dominates_umegaki", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             trace_distance(rho, sigma), umegaki(rho.op(), sigma.op()).value,
                                             bs_entropy(rho.op(), sigma.op()).value, ctx.tol());
                 }});

    c.push_back({"bs_commuting_equality", "D^(rho||sigma) = D(rho||sigma) for commuting rho, sigma", 1, {3},
                 {SamplerKind::ginibre}, 1e-10, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix sigma = detail::commuting_partner(rho, ctx.rng);
                   const double gap =
                       std::abs(bs_entropy(rho.op(), sigma.op()).value - umegaki(rho.op(), sigma.op()).value);
                   return BoundReport::upper("bs_commuting_equality", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             trace_distance(rho, sigma), gap, 0.0, ctx.tol());
                 }});

    c.push_back({"bs_sigma_form", "D^(rho||sigma) = tr[sigma X log X], X = sigma^{-1/2} rho sigma^{-1/2}", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-9, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix sigma = ctx.full_rank(d[0]);
                   const double gap = std::abs(bs_entropy(rho.op(), sigma.op()).value -
                                               bs_entropy_sigma_form(rho.op(), sigma.op()));
                   return BoundReport::upper("bs_sigma_form", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             trace_distance(rho, sigma), gap, 0.0, ctx.tol());
                 }});

    c.push_back({"operator_entropy_inequality",
                 "-A log A <= -p A1 log A1 - (1-p) A2 log A2 + h_{A1,A2}(p) 1", 1, {3}, {SamplerKind::ginibre}, 1e-9,
                 false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto a1 = HermitianOperator::unchecked(random_psd(d[0], ctx.rng).matrix() *
                                                                ctx.rng.uniform(0.1, 1.0) / d[0]);
                   const auto a2 = HermitianOperator::unchecked(random_psd(d[0], ctx.rng).matrix() *
                                                                ctx.rng.uniform(0.1, 1.0) / d[0]);
                   return check_operator_entropy_inequality(a1, a2, ctx.rng.uniform(), ctx.tol());
                 }});

    c.push_back({"umegaki_almost_concavity", "-f(p) <= D(rho_p||sigma_p) - p D_1 - (1-p) D_2 <= 0", 1, {3},
                 {SamplerKind::ginibre_rank_k}, 1e-8, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]);
                   const DensityMatrix s1 = sample_dominating(r1, ctx.rng);
                   const DensityMatrix r2 = ctx.draw(d[0]);
                   const DensityMatrix s2 = sample_dominating(r2, ctx.rng);
                   return detail::named(worst_of(check_almost_concavity(DivergenceKind::umegaki, {r1, s1}, {r2, s2},
                                                                        default_p_grid(), {}, ctx.tol())),
                                        "umegaki_almost_concavity");
                 }});

    c.push_back({"bs_almost_concavity", "-f^(p) <= D^(rho_p||sigma_p) - p D^_1 - (1-p) D^_2 <= 0", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]);
                   const DensityMatrix s1 = ctx.draw(d[0]);
                   const DensityMatrix r2 = ctx.draw(d[0]);
                   const DensityMatrix s2 = ctx.draw(d[0]);
                   return detail::named(worst_of(check_almost_concavity(DivergenceKind::bs, {r1, s1}, {r2, s2},
                                                                        default_p_grid(), {}, ctx.tol())),
                                        "bs_almost_concavity");
                 }});

    c.push_back({"tightness", "f(p) = -Delta(p) on |0>,|1> against diag(t,1-t), diag(1-t,t)", 1, {2},
                 {SamplerKind::ginibre}, 1e-9, false, [](TrialContext& ctx, const std::vector<Index>&) {
                   const double t = ctx.rng.uniform(0.05, 0.95);
                   const StatePair a{DensityMatrix::basis_state(2, 0), DensityMatrix::diagonal({t, 1.0 - t})};
                   const StatePair b{DensityMatrix::basis_state(2, 1), DensityMatrix::diagonal({1.0 - t, t})};
                   const RemainderFunction f = umegaki_remainder(a.rho, a.sigma, b.rho, b.sigma);
                   std::vector<BoundReport> out;
                   for (double p : default_p_grid()) {
                     const double gap = std::abs(f(p) + concavity_defect(DivergenceKind::umegaki, a, b, p));
                     out.push_back(BoundReport::upper("tightness", "", t, gap, 0.0, ctx.tol()));
                   }
                   return worst_of(out);
                 }});

    c.push_back({"special_case_endpoint", "f(0) = f(1) = f^(0) = f^(1) = 0", 1, {3}, {SamplerKind::ginibre}, 0.0,
                 false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]), s1 = ctx.draw(d[0]);
                   const DensityMatrix r2 = ctx.draw(d[0]), s2 = ctx.draw(d[0]);
                   const auto f = umegaki_remainder(r1, s1, r2, s2);
                   const auto g = bs_remainder(r1, s1, r2, s2);
                   const double worst = std::max({std::abs(f(0.0)), std::abs(f(1.0)), std::abs(g(0.0)),
                                                  std::abs(g(1.0))});
                   return BoundReport::upper("special_case_endpoint", fingerprint({&r1.matrix(), &r2.matrix()}), 0.0,
                                             worst, 0.0, ctx.tol());
                 }});

    c.push_back({"special_case_common_sigma_umegaki", "Delta(p) >= -h(p) when sigma_1 = sigma_2", 1, {3},
                 {SamplerKind::ginibre_rank_k}, 1e-8, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]), r2 = ctx.draw(d[0]);
                   const DensityMatrix s = ctx.full_rank(d[0]);
                   const auto f = special_case_remainder(DivergenceKind::umegaki, SpecialCase::common_second_argument);
                   std::vector<BoundReport> out;
                   for (double p : default_p_grid()) {
                     out.push_back(BoundReport::sandwich("special_case_common_sigma_umegaki", "", p, -f(p),
                                                         concavity_defect(DivergenceKind::umegaki, {r1, s}, {r2, s}, p),
                                                         0.0, ctx.tol()));
                   }
                   return worst_of(out);
                 }});

    c.push_back({"special_case_common_sigma_bs", "Delta^(p) >= -c^_0 h(p) when sigma_1 = sigma_2", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]), r2 = ctx.draw(d[0]);
                   const DensityMatrix s = ctx.full_rank(d[0]);
                   const double c0 = 1.0 / min_eigenvalue(s.op());
                   const auto f = special_case_remainder(DivergenceKind::bs, SpecialCase::common_second_argument, c0);
                   std::vector<BoundReport> out;
                   for (double p : default_p_grid()) {
                     out.push_back(BoundReport::sandwich("special_case_common_sigma_bs", "", p, -f(p),
                                                         concavity_defect(DivergenceKind::bs, {r1, s}, {r2, s}, p),
                                                         0.0, ctx.tol()));
                   }
                   return worst_of(out);
                 }});

    for (auto kind : {DivergenceKind::umegaki, DivergenceKind::bs}) {
      const std::string name = std::string("special_case_marginal_identity_") + to_string(kind);
      c.push_back({name,
                   kind == DivergenceKind::umegaki ? "Delta(p) >= -h(p) when sigma_i = (rho_i)_A (x) 1_B"
                                                   : "Delta^(p) >= -c^_0 h(p) when sigma_i = (rho_i)_A (x) 1_B",
                   2, {2, 2}, {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                   [kind, name](TrialContext& ctx, const std::vector<Index>& d) {
                     const auto layout = SubsystemLayout::lettered(d);
                     const Index n = detail::prod(d);
                     const DensityMatrix r1 = ctx.draw(n), r2 = ctx.draw(n);
                     const HermitianOperator m1 = partial_trace(r1.op(), layout, {"A"});
                     const HermitianOperator m2 = partial_trace(r2.op(), layout, {"A"});
                     const HermitianOperator s1 = embed(m1, layout, {"A"});
                     const HermitianOperator s2 = embed(m2, layout, {"A"});
                     const double c0 = std::max(1.0 / min_eigenvalue(m1), 1.0 / min_eigenvalue(m2));
                     const auto f = special_case_remainder(kind, SpecialCase::marginal_times_identity, c0);
                     std::vector<BoundReport> out;
                     for (double p : default_p_grid()) {
                       out.push_back(BoundReport::sandwich(name, "", p, -f(p),
                                                           detail::operator_defect(kind, r1, s1, r2, s2, p), 0.0,
                                                           ctx.tol()));
                     }
                     return worst_of(out);
                   }});
    }

    c.push_back({"alpha_commuting", "alpha(O, P, Q) = tr[O P Q] for commuting O, P, Q", 1, {3},
                 {SamplerKind::ginibre}, 1e-8, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix o = ctx.draw(d[0]);
                   const DensityMatrix p = detail::commuting_partner(o, ctx.rng);
                   const DensityMatrix q = detail::commuting_partner(o, ctx.rng);
                   const double exact = (o.matrix() * p.matrix() * q.matrix()).trace().real();
                   const double gap = std::abs(alpha(o.op(), p.op(), q.op()) - exact);
                   return BoundReport::upper("alpha_commuting", fingerprint({&o.matrix(), &p.matrix(), &q.matrix()}),
                                             0.0, gap, 0.0, ctx.tol());
                 }});

    c.push_back({"alpha_c1_bound", "c_1 = alpha(rho_1, sigma_1^{-1}, sigma_2) <= 1/m~_{sigma_1}", 1, {3},
                 {SamplerKind::ginibre_rank_k}, 1e-8, false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]);
                   const DensityMatrix s1 = sample_dominating(r1, ctx.rng);
                   const DensityMatrix s2 = ctx.mixed_rank(d[0]);
                   const double c1 = alpha(r1.op(), pseudo_inverse(s1.op()), s2.op());
                   return BoundReport::upper("alpha_c1_bound", fingerprint({&r1.matrix(), &s1.matrix(), &s2.matrix()}),
                                             0.0, c1, 1.0 / min_nonzero_eigenvalue(s1.op()), ctx.tol());
                 }});

    c.push_back({"delta_states_distance", "(1/2)||gamma_+ - gamma_-||_1 = 1 - t", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-10, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]), sigma = ctx.draw(d[0]), tau = ctx.draw(d[0]);
                   const double t = ctx.pick({0.0, 0.3, 0.7});
                   const DeltaStates g = delta_states(rho, sigma, tau, t);
                   return BoundReport::upper("delta_states_distance", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             t, std::abs(trace_distance(g.plus, g.minus) - (1.0 - t)), 0.0,
                                             ctx.tol());
                 }});

    c.push_back({"omega_identity", "both convex-combination forms of omega agree", 1, {3},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-12, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]), sigma = ctx.draw(d[0]), tau = ctx.draw(d[0]);
                   const double t = ctx.pick({0.0, 0.3, 0.7});
                   return BoundReport::upper("omega_identity", fingerprint({&rho.matrix(), &sigma.matrix()}), t,
                                             omega_representations(rho, sigma, tau, t).max_entry_gap(), 0.0,
                                             ctx.tol());
                 }});

    c.push_back({"alaff_ce_continuity", "|H_rho(A|B) - H_sigma(A|B)| <= ALAFF continuity bound (t = 0)", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const AlaffFunction f = conditional_entropy_alaff(layout);
                   const double eps = trace_distance(rho, sigma);
                   const double diff = std::abs(f.evaluate(rho) - f.evaluate(sigma));
                   return BoundReport::upper("alaff_ce_continuity", fingerprint({&rho.matrix(), &sigma.matrix()}), eps,
                                             diff, eps > 0.0 ? continuity_bound(eps, f) : 0.0, ctx.tol());
                 }});

    c.push_back({"ce_continuity", "|H_rho(A|B) - H_sigma(A|B)| <= 2 eps log d_A + r(eps)", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure, SamplerKind::identical}, 1e-8,
                 false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const double eps = trace_distance(rho, sigma);
                   const double diff =
                       std::abs(conditional_entropy(rho, layout, "B") - conditional_entropy(sigma, layout, "B"));
                   return BoundReport::upper("ce_continuity", fingerprint({&rho.matrix(), &sigma.matrix()}), eps, diff,
                                             ce_bound(eps, d[0]), ctx.tol());
                 }});

    c.push_back({"mi_continuity", "|I_rho(A:B) - I_sigma(A:B)| <= 2 eps log min{d_A, d_B} + 2 r(eps)", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure, SamplerKind::identical}, 1e-8,
                 false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const double eps = trace_distance(rho, sigma);
                   const double diff = std::abs(mutual_information(rho, layout) - mutual_information(sigma, layout));
                   return BoundReport::upper("mi_continuity", fingerprint({&rho.matrix(), &sigma.matrix()}), eps, diff,
                                             mi_bound(eps, d[0], d[1]), ctx.tol());
                 }});

    c.push_back({"cmi_continuity", "|I_rho(A:B|C) - I_sigma(A:B|C)| <= 2 eps log min{d_A, d_B} + 2 r(eps)", 3,
                 {2, 2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure, SamplerKind::identical}, 1e-8,
                 false, [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const double eps = trace_distance(rho, sigma);
                   const double diff = std::abs(conditional_mutual_information(rho, layout, "A", "B", "C") -
                                                conditional_mutual_information(sigma, layout, "A", "B", "C"));
                   return BoundReport::upper("cmi_continuity", fingerprint({&rho.matrix(), &sigma.matrix()}), eps,
                                             diff, cmi_bound(eps, d[0], d[1]), ctx.tol());
                 }});

    c.push_back({"divergence_bound_linear", "D(rho||sigma) <= eps log(1/m~_sigma) + r(eps)", 1, {3},
                 {SamplerKind::ginibre_rank_k, SamplerKind::ginibre, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix sigma = sample_dominating(rho, ctx.rng);
                   const DivergenceBound b = divergence_bound(rho, sigma);
                   return BoundReport::upper("divergence_bound_linear", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             b.epsilon, umegaki(rho.op(), sigma.op()).value, b.linear, ctx.tol());
                 }});

    c.push_back({"divergence_bound_sqrt", "eps log(1/m~) + r(eps) <= (1 + log(1/m~)/sqrt 2) sqrt(2 eps)", 1, {3},
                 {SamplerKind::ginibre_rank_k, SamplerKind::ginibre, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix sigma = sample_dominating(rho, ctx.rng);
                   const DivergenceBound b = divergence_bound(rho, sigma);
                   return BoundReport::upper("divergence_bound_sqrt", fingerprint({&rho.matrix(), &sigma.matrix()}),
                                             b.epsilon, b.linear, b.sqrt_form, ctx.tol());
                 }});

    c.push_back({"second_input_continuity",
                 "|D(rho||sigma_1) - D(rho||sigma_2)| <= 3 log^2(1/m~)/(1-m~) ||sigma_1 - sigma_2||_1^{1/2}", 1, {3},
                 {SamplerKind::ginibre_rank_k, SamplerKind::ginibre, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix rho = ctx.draw(d[0]);
                   const DensityMatrix s1 = sample_dominating(rho, ctx.rng);
                   const DensityMatrix s2 =
                       ctx.rng.uniform() < 0.5 ? sample_dominating(rho, ctx.rng)
                                               : mix(ctx.rng.uniform(0.5, 1.0), s1, sample_dominating(rho, ctx.rng));
                   const double m = campaign_m_tilde({&rho}, {&s1, &s2});
                   const double diff = std::abs(umegaki(rho.op(), s1.op()).value - umegaki(rho.op(), s2.op()).value);
                   return BoundReport::upper("second_input_continuity",
                                             fingerprint({&rho.matrix(), &s1.matrix(), &s2.matrix()}),
                                             trace_distance(s1, s2), diff, second_input_bound(rho, s1, s2, m),
                                             ctx.tol());
                 }});

    c.push_back({"two_input_continuity",
                 "|D(rho_1||sigma_1) - D(rho_2||sigma_2)| <= (1 + log(1/m~)/sqrt 2)||rho_1 - rho_2||^{1/2} + "
                 "5 log^2(1/m~)/(sqrt 2 (1-m~)) ||sigma_1 - sigma_2||^{1/2}",
                 1, {3}, {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const DensityMatrix r1 = ctx.draw(d[0]);
                   const DensityMatrix r2 = mix(ctx.rng.uniform(0.5, 1.0), r1, ctx.draw(d[0]));
                   const DensityMatrix s1 = ctx.full_rank(d[0]);
                   const DensityMatrix s2 = mix(ctx.rng.uniform(0.5, 1.0), s1, ctx.full_rank(d[0]));
                   const double m = campaign_m_tilde({&r1, &r2}, {&s1, &s2});
                   const double diff = std::abs(umegaki(r1.op(), s1.op()).value - umegaki(r2.op(), s2.op()).value);
                   return BoundReport::upper("two_input_continuity",
                                             fingerprint({&r1.matrix(), &r2.matrix(), &s1.matrix(), &s2.matrix()}),
                                             trace_distance(r1, r2), diff, two_input_bound(r1, r2, s1, s2, m),
                                             ctx.tol());
                 }});

    for (const bool mutual : {false, true}) {
      const std::string name = mutual ? "bs_mi_continuity" : "bs_ce_continuity";
      c.push_back({name,
                   mutual ? "|I^_rho(A:B) - I^_sigma(A:B)| <= C sqrt(eps) / (m (1/d_H - m))"
                          : "|H^_rho(A|B) - H^_sigma(A|B)| <= C sqrt(eps) / (m (1/d_H - m))",
                   2, {2, 2}, {SamplerKind::min_eig_floor}, 1e-8, true,
                   [mutual, name](TrialContext& ctx, const std::vector<Index>& d) {
                     const auto layout = SubsystemLayout::lettered(d);
                     const Index n = detail::prod(d);
                     const double m = ctx.config().floor;
                     const DensityMatrix rho = ctx.draw(n);
                     const double eps = std::pow(10.0, ctx.rng.uniform(-3.0, -1.0));
                     const DensityMatrix sigma = detail::at_distance(rho, ctx.draw(n), eps);
                     auto q = [&](const DensityMatrix& s) {
                       return mutual ? bs_mutual_information(s, layout).value
                                     : bs_conditional_entropy(s, layout, "B").value;
                     };
                     const double e = trace_distance(rho, sigma);
                     return BoundReport::upper(name, fingerprint({&rho.matrix(), &sigma.matrix()}), e,
                                               std::abs(q(rho) - q(sigma)),
                                               bs_quantity_bound(e, m, n, *ctx.config().bs_constant), ctx.tol());
                   }});
    }

    c.push_back({"markov_sandwich",
                 "(pi/8)^4 ||rho_B^-1||^-2 ||rho^-1||^-2 ||Delta||_1^4 <= I(A:C|B) <= "
                 "2 (log min{d_A, d_C} + 1) ||Delta||_1^{1/2}",
                 3, {2, 2, 2}, {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   const DensityMatrix rho = ctx.draw(detail::prod(d));
                   const MarkovSandwich s = markov_sandwich(rho, layout);
                   return BoundReport::sandwich("markov_sandwich", fingerprint({&rho.matrix()}), s.recovery_distance,
                                                s.lower.value_or(0.0), s.cmi, s.upper, ctx.tol());
                 }});

    c.push_back({"petz_recovery_trace", "tr[Petz recovery] = 1 and recovery >= 0 for full-rank rho_B", 3, {2, 2, 2},
                 {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   const DensityMatrix rho = ctx.draw(detail::prod(d));
                   const PetzRecovery r = petz_recovery(rho, layout);
                   const double defect = std::max(std::abs(r.op.trace() - 1.0), -min_eigenvalue(r.op));
                   return BoundReport::upper("petz_recovery_trace", fingerprint({&rho.matrix()}), 0.0, defect, 0.0,
                                             ctx.tol());
                 }});

    c.push_back({"uncertainty_relation", "H(X|M) + H(Y|M) >= -xi_RE + H(A|M)", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   const DensityMatrix rho = ctx.draw(detail::prod(d));
                   const BasisPair bases = BasisPair::computational_and(haar_unitary(d[0], ctx.rng));
                   return check_uncertainty(rho, layout, bases, ctx.tol());
                 }});

    c.push_back({"dc_almost_affinity_umegaki",
                 "-h(p) <= D_C(p rho + (1-p) sigma) - p D_C(rho) - (1-p) D_C(sigma) <= 0, C = {1/d_A (x) sigma_B}", 2,
                 {2, 2}, {SamplerKind::ginibre, SamplerKind::ginibre_rank_k, SamplerKind::pure}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const double log_da = std::log(static_cast<double>(d[0]));
                   const DivergenceToSet closed = [&](const DensityMatrix& s) {
                     return log_da - conditional_entropy(s, layout, "B");
                   };
                   return detail::named(worst_of(check_dc_almost_affinity(closed, DivergenceKind::umegaki, rho, sigma,
                                                                          default_p_grid(), ctx.tol())),
                                        "dc_almost_affinity_umegaki");
                 }});

    c.push_back({"dc_almost_affinity_bs",
                 "-g_d(p) <= D^_C(p rho + (1-p) sigma) - p D^_C(rho) - (1-p) D^_C(sigma) <= 0, C = {1/d_A (x) sigma_B}",
                 2, {2, 2}, {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-6, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const ConvexSet set = locally_maximally_mixed(layout);
                   SolverConfig cfg;
                   cfg.starts = 2;
                   cfg.seed = ctx.rng.next();
                   const DivergenceToSet solve = [&](const DensityMatrix& s) {
                     return optimized_divergence(s, set, DivergenceKind::bs, cfg).value;
                   };
                   return detail::named(worst_of(check_dc_almost_affinity(solve, DivergenceKind::bs, rho, sigma,
                                                                          {0.1, 0.3, 0.5, 0.7, 0.9}, ctx.tol())),
                                        "dc_almost_affinity_bs");
                 }});

    c.push_back({"dc_ree_bound",
                 "|D_C(rho) - D_C(sigma)| <= eps log min{d_A, d_B} + r(eps), C = product states", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::ginibre_rank_k}, 1e-6, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   auto [rho, sigma] = ctx.draw_pair(detail::prod(d));
                   const ConvexSet set = product_states(layout);
                   SolverConfig cfg;
                   cfg.starts = 2;
                   cfg.seed = ctx.rng.next();
                   const double a = optimized_divergence(rho, set, DivergenceKind::umegaki, cfg).value;
                   const double b = optimized_divergence(sigma, set, DivergenceKind::umegaki, cfg).value;
                   const double eps = trace_distance(rho, sigma);
                   return BoundReport::upper("dc_ree_bound", fingerprint({&rho.matrix(), &sigma.matrix()}), eps,
                                             std::abs(a - b),
                                             eps * std::log(static_cast<double>(std::min(d[0], d[1]))) + r_epsilon(eps),
                                             ctx.tol());
                 }});

    c.push_back({"bs_variational_ce", "H^var(A|B) >= H^(A|B)", 2, {2, 2},
                 {SamplerKind::ginibre, SamplerKind::min_eig_floor}, 1e-8, false,
                 [](TrialContext& ctx, const std::vector<Index>& d) {
                   const auto layout = SubsystemLayout::lettered(d);
                   const DensityMatrix rho = ctx.draw(detail::prod(d));
                   SolverConfig cfg;
                   cfg.starts = 1;
                   cfg.seed = ctx.rng.next();
                   const double var = variational_bs_conditional_entropy(rho, layout, cfg);
                   const double plug_in = bs_conditional_entropy(rho, layout, "B").value;
                   return BoundReport::upper("bs_variational_ce", fingerprint({&rho.matrix()}), 0.0, plug_in, var,
                                             ctx.tol());
                 }});

    return c;
  }();
  return registry;
}

inline const Check& find_check(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown check " + name + " (see list-checks)");
}

struct CampaignSummary {
  std::string check_name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  /// max measured / bound over reports with a positive finite bound.
  double max_ratio = 0.0;
  /// For checks scaled by the BS constant: smallest C under which every trial passes.
  std::optional<double> smallest_passing_constant;

  bool all_passed() const { return passed == trials; }
};

struct CampaignResult {
  std::vector<BoundReport> reports;
  CampaignSummary summary;
};

/// Validates the configuration against the check's domain before sampling.
inline void validate(const CampaignConfig& cfg, const Check& check) {
  if (cfg.trials < 1) throw std::invalid_argument("campaign: trials must be at least 1");
  const auto& dims = cfg.dims.empty() ? check.default_dims : cfg.dims;
  if (dims.size() != check.factors) {
    throw std::invalid_argument("campaign: check " + check.name + " needs " + std::to_string(check.factors) +
                                " factor dimension(s), got " + std::to_string(dims.size()));
  }
  for (Index d : dims) {
    if (d < 2) throw std::invalid_argument("campaign: factor dimensions must be at least 2");
  }
  if (cfg.sampler &&
      std::find(check.samplers.begin(), check.samplers.end(), *cfg.sampler) == check.samplers.end()) {
    throw std::invalid_argument(std::string("campaign: sampler ") + to_string(*cfg.sampler) +
                                " does not match the domain of " + check.name);
  }
  const SamplerKind s = cfg.sampler.value_or(check.samplers.front());
  if (s == SamplerKind::min_eig_floor) {
    const double n = static_cast<double>(detail::prod(dims));
    if (!(cfg.floor > 0.0 && cfg.floor < 1.0 / n)) {
      throw std::invalid_argument("campaign: floor must lie in (0, 1/dim)");
    }
  }
  if (check.needs_bs_constant && !cfg.bs_constant) {
    throw std::invalid_argument("campaign: " + check.name +
                                " needs an explicit BS constant; the bound's absolute constant is not known");
  }
}

inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  const Check& check = find_check(cfg.check_name);
  validate(cfg, check);
  const std::vector<Index> dims = cfg.dims.empty() ? check.default_dims : cfg.dims;
  const SamplerKind sampler = cfg.sampler.value_or(check.samplers.front());
  const double tol = cfg.tolerance.value_or(check.tolerance);

  CampaignResult result;
  result.reports.resize(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.trials; i = next++) {
      TrialContext ctx(trial_seed(cfg.seed, i), cfg, sampler, tol);
      try {
        result.reports[i] = check.trial(ctx, dims);
      } catch (const std::exception& e) {
        BoundReport r;
        r.bound_name = check.name;
        r.measured = std::numeric_limits<double>::quiet_NaN();
        r.margin = -std::numeric_limits<double>::infinity();
        r.tolerance = tol;
        r.pass = false;
        r.note = std::string("error: ") + e.what();
        result.reports[i] = r;
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cfg.trials));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CampaignSummary& s = result.summary;
  s.check_name = check.name;
  s.trials = cfg.trials;
  for (const auto& r : result.reports) {
    if (r.pass) ++s.passed;
    s.worst_margin = std::min(s.worst_margin, r.margin);
    if (r.bound > 0.0 && std::isfinite(r.bound) && std::isfinite(r.measured)) {
      s.max_ratio = std::max(s.max_ratio, r.measured / r.bound);
    }
  }
  if (check.needs_bs_constant) s.smallest_passing_constant = s.max_ratio * *cfg.bs_constant;
  return result;
}

inline nlohmann::json to_json(const CampaignSummary& s) {
  nlohmann::json j{{"check", s.check_name},          {"trials", s.trials},
                   {"passed", s.passed},             {"failed", s.trials - s.passed},
                   {"worst_margin", s.worst_margin}, {"max_ratio", s.max_ratio}};
  if (s.smallest_passing_constant) j["smallest_passing_constant"] = *s.smallest_passing_constant;
  return j;
}

}  // namespace qcont
