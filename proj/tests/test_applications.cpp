#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcont/applications.hpp"

using namespace qcont;

namespace {

Matrix hadamard() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

const SubsystemLayout kTri = SubsystemLayout::lettered({2, 2, 2});
const SubsystemLayout kBi = SubsystemLayout::lettered({2, 2});

}  // namespace

TEST(Petz, RecoversMarkovChainsFromEitherSide) {
  const DensityMatrix left = tensor(sample_ginibre_state(2, 2, std::uint64_t{1}),
                                    sample_ginibre_state(4, 4, std::uint64_t{2}));
  const DensityMatrix right = tensor(sample_ginibre_state(4, 4, std::uint64_t{3}),
                                     sample_ginibre_state(2, 2, std::uint64_t{4}));
  EXPECT_LT(max_abs(petz_recovery(left, kTri).op.matrix() - left.matrix()), 1e-10);
  EXPECT_LT(max_abs(petz_recovery(right, kTri).op.matrix() - right.matrix()), 1e-10);
}

TEST(Petz, TraceOneAndPositive) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_ginibre_state(8, 8, trial_seed(51, s));
    const PetzRecovery r = petz_recovery(rho, kTri);
    EXPECT_NEAR(r.op.trace(), 1.0, 1e-8);
    EXPECT_GE(min_eigenvalue(r.op), -1e-10);
    EXPECT_FALSE(r.singular_b);
  }
}

TEST(Markov, ExactChainGivesZeros) {
  const DensityMatrix rho = tensor(sample_ginibre_state(2, 2, std::uint64_t{5}),
                                   sample_ginibre_state(4, 4, std::uint64_t{6}));
  const MarkovSandwich s = markov_sandwich(rho, kTri);
  ASSERT_TRUE(s.lower.has_value());
  EXPECT_LT(*s.lower, 1e-8);
  EXPECT_LT(std::abs(s.cmi), 1e-8);
  EXPECT_LT(s.upper, 1e-7);
}

TEST(Markov, SandwichOnRandomStates) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const MarkovSandwich m = markov_sandwich(sample_ginibre_state(8, 8, trial_seed(52, s)), kTri);
    ASSERT_TRUE(m.lower.has_value());
    EXPECT_LE(*m.lower, m.cmi + 1e-8);
    EXPECT_LE(m.cmi, m.upper + 1e-8);
  }
}

TEST(Markov, PerturbedChainIsNearlyRecoverable) {
  const DensityMatrix markov = tensor(sample_ginibre_state(2, 2, std::uint64_t{7}),
                                      sample_ginibre_state(4, 4, std::uint64_t{8}));
  const DensityMatrix rho = mix(1.0 - 1e-3, markov, DensityMatrix::maximally_mixed(8));
  const MarkovSandwich s = markov_sandwich(rho, kTri);
  EXPECT_LT(s.cmi, 1e-3);
  EXPECT_LT(s.upper, 0.5);
  EXPECT_LE(*s.lower, s.cmi + 1e-8);
  EXPECT_LE(s.cmi, s.upper + 1e-8);
}

TEST(Markov, RankDeficientStateHasNoLowerBound) {
  const MarkovSandwich s = markov_sandwich(sample_ginibre_state(8, 3, std::uint64_t{9}), kTri);
  EXPECT_FALSE(s.lower.has_value());
  EXPECT_LE(s.cmi, s.upper + 1e-8);
}

TEST(Uncertainty, MutuallyUnbiasedQubitBasesGiveZeroXi) {
  const auto c = uncertainty_constants(BasisPair::computational_and(hadamard()));
  EXPECT_NEAR(c.m, 0.25, 1e-15);
  ASSERT_TRUE(c.xi.has_value());
  EXPECT_EQ(*c.xi, 0.0);
  EXPECT_EQ(*uncertainty_constants(BasisPair::fourier(3)).xi, 0.0);
}

TEST(Uncertainty, IdenticalBasesAreFlagged) {
  const BasisPair same = BasisPair::computational_and(Matrix::Identity(2, 2));
  const auto c = uncertainty_constants(same);
  EXPECT_EQ(c.m, 0.0);
  EXPECT_FALSE(c.xi.has_value());
  EXPECT_THROW(check_uncertainty(DensityMatrix::maximally_mixed(4), kBi, same), std::domain_error);
}

TEST(Uncertainty, GenericRotationHasFiniteConstants) {
  const auto c = uncertainty_constants(BasisPair::computational_and(haar_unitary(2, std::uint64_t{10})));
  EXPECT_GT(c.m, 0.0);
  ASSERT_TRUE(c.xi.has_value());
  EXPECT_TRUE(std::isfinite(*c.xi));
  EXPECT_GT(*c.xi, 0.0);
}

TEST(Uncertainty, MaximallyMixedMargin) {
  const auto r = check_uncertainty(DensityMatrix::maximally_mixed(4), kBi, BasisPair::computational_and(hadamard()));
  EXPECT_NEAR(r.margin, std::log(2.0), 1e-12);
}

TEST(Uncertainty, PureProductMargin) {
  const DensityMatrix rho = tensor(DensityMatrix::basis_state(2, 0), sample_ginibre_state(2, 2, std::uint64_t{11}));
  const auto t = uncertainty_terms(rho, kBi, BasisPair::computational_and(hadamard()));
  EXPECT_NEAR(t.h_x_given_m, 0.0, 1e-12);
  EXPECT_NEAR(t.h_y_given_m, std::log(2.0), 1e-12);
  EXPECT_NEAR(t.h_a_given_m, 0.0, 1e-12);
  EXPECT_NEAR(check_uncertainty(rho, kBi, BasisPair::computational_and(hadamard())).margin, std::log(2.0), 1e-12);
}

TEST(Uncertainty, RandomStatesAndRotations) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(trial_seed(53, s));
    const BasisPair b = BasisPair::computational_and(haar_unitary(2, rng));
    EXPECT_TRUE(check_uncertainty(sample_mixed_rank(4, rng), kBi, b).pass);
  }
}

TEST(Parametrization, RoundTrips) {
  Rng rng(12);
  const Matrix h = random_hermitian(3, rng).matrix();
  const auto theta = params_from_hermitian(h);
  EXPECT_EQ(theta.size(), 9u);
  EXPECT_LT(max_abs(hermitian_from_params(theta, 3) - h), 1e-15);
  const DensityMatrix g = sample_ginibre_state(3, 3, rng);
  EXPECT_LT(max_abs(gibbs_state(hermitian_from_params(gibbs_params(g), 3)).matrix() - g.matrix()), 1e-10);
}

TEST(Optimizer, MemberOfSetHasZeroDistance) {
  const DensityMatrix member = tensor(DensityMatrix::maximally_mixed(2), sample_ginibre_state(2, 2, std::uint64_t{13}));
  const auto r = optimized_divergence(member, locally_maximally_mixed(kBi), DivergenceKind::umegaki);
  EXPECT_NEAR(r.value, 0.0, 1e-8);
  EXPECT_LT(max_abs(r.minimizer.matrix() - member.matrix()), 1e-4);
}

TEST(Optimizer, MatchesClosedFormForLocallyMaximallyMixedSet) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const DensityMatrix rho = sample_ginibre_state(4, 1 + s % 4, trial_seed(54, s));
    const auto r = optimized_divergence(rho, locally_maximally_mixed(kBi), DivergenceKind::umegaki);
    EXPECT_NEAR(r.value, std::log(2.0) - conditional_entropy(rho, kBi, "B"), 1e-6);
    EXPECT_LT(max_abs(partial_trace(r.minimizer, kBi, {"B"}).matrix() - partial_trace(rho, kBi, {"B"}).matrix()),
              1e-3);
  }
}

TEST(Optimizer, ProductSetMatchesGridOracle) {
  for (std::uint64_t s = 0; s < 2; ++s) {
    const DensityMatrix rho = sample_ginibre_state(4, 4, trial_seed(55, s));
    const auto r = optimized_divergence(rho, product_states(kBi), DivergenceKind::umegaki);
    EXPECT_NEAR(r.value, oracle::product_state_distance_grid(rho), 1e-4);
    EXPECT_NEAR(r.value, mutual_information(rho, kBi), 1e-6);
  }
}

TEST(Optimizer, ObjectiveLogIsMonotone) {
  const DensityMatrix rho = sample_ginibre_state(4, 4, std::uint64_t{14});
  const auto r = optimized_divergence(rho, product_states(kBi), DivergenceKind::bs);
  ASSERT_FALSE(r.objective_log.empty());
  for (std::size_t i = 1; i < r.objective_log.size(); ++i) {
    EXPECT_LE(r.objective_log[i], r.objective_log[i - 1]);
  }
  EXPECT_LE(r.value, divergence(DivergenceKind::bs, rho.op(), DensityMatrix::maximally_mixed(4).op()).value);
}

TEST(Optimizer, ReportsIterationLimit) {
  SolverConfig cfg;
  cfg.max_iters = 1;
  cfg.starts = 0;
  ConvexSet cold = product_states(kBi);
  cold.warm_starts = nullptr;
  const auto r = optimized_divergence(sample_ginibre_state(4, 4, std::uint64_t{15}), cold, DivergenceKind::umegaki, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.diagnostic.empty());
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(VariationalBs, ClassicalAndMaximallyMixed) {
  const DensityMatrix classical = DensityMatrix::diagonal({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(variational_bs_conditional_entropy(classical, kBi), conditional_entropy(classical, kBi, "B"), 1e-6);
  EXPECT_NEAR(variational_bs_conditional_entropy(DensityMatrix::maximally_mixed(4), kBi), std::log(2.0), 1e-8);
}

TEST(VariationalBs, DominatesPlugIn) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const DensityMatrix rho = sample_ginibre_state(4, 4, trial_seed(56, s));
    EXPECT_GE(variational_bs_conditional_entropy(rho, kBi), bs_conditional_entropy(rho, kBi, "B").value - 1e-8);
  }
}

TEST(Affinity, EqualStatesGiveZeroDeviation) {
  const DensityMatrix rho = sample_ginibre_state(4, 4, std::uint64_t{16});
  const DivergenceToSet closed = [](const DensityMatrix& s) {
    return std::log(2.0) - conditional_entropy(s, kBi, "B");
  };
  for (const auto& r : check_dc_almost_affinity(closed, DivergenceKind::umegaki, rho, rho, default_p_grid())) {
    EXPECT_NEAR(r.measured, 0.0, 1e-12);
  }
}

TEST(Affinity, ClosedFormUmegakiPath) {
  const DivergenceToSet closed = [](const DensityMatrix& s) {
    return std::log(2.0) - conditional_entropy(s, kBi, "B");
  };
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(trial_seed(57, s));
    const DensityMatrix rho = sample_mixed_rank(4, rng), sigma = sample_mixed_rank(4, rng);
    for (const auto& r :
         check_dc_almost_affinity(closed, DivergenceKind::umegaki, rho, sigma, default_p_grid(), 1e-8)) {
      EXPECT_TRUE(r.pass) << "p=" << r.epsilon << " deviation=" << r.measured;
    }
  }
}

TEST(Affinity, BsSolverPath) {
  const ConvexSet set = locally_maximally_mixed(kBi);
  const DivergenceToSet solve = [&](const DensityMatrix& s) {
    return optimized_divergence(s, set, DivergenceKind::bs).value;
  };
  Rng rng(58);
  const DensityMatrix rho = sample_ginibre_state(4, 4, rng), sigma = sample_ginibre_state(4, 4, rng);
  for (const auto& r : check_dc_almost_affinity(solve, DivergenceKind::bs, rho, sigma, {0.25, 0.5, 0.75})) {
    EXPECT_TRUE(r.pass) << "p=" << r.epsilon << " deviation=" << r.measured;
  }
}
