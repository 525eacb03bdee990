#include <cmath>

#include <gtest/gtest.h>

#include "qcont/entropies.hpp"
#include "qcont/sampling.hpp"

using namespace qcont;

namespace {

// Classical Kullback-Leibler divergence, used as an oracle on diagonal inputs.
double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

DensityMatrix bell() {
  CVector psi = CVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix::pure(psi);
}

}  // namespace

TEST(VonNeumann, PureAndMaximallyMixed) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::basis_state(3, 1)), 0.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(4)), std::log(4.0), 1e-14);
}

TEST(BinaryEntropy, Values) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_THROW(binary_entropy(1.5), std::domain_error);
}

TEST(REpsilon, AtOne) { EXPECT_NEAR(r_epsilon(1.0), 2.0 * std::log(2.0), 1e-15); }

TEST(GD, VanishesAtZeroAndIsFinite) {
  EXPECT_EQ(g_d(0.0, 2), 0.0);
  EXPECT_GT(g_d(0.3, 4), binary_entropy(0.3));
  EXPECT_THROW(g_d(0.3, 1), std::domain_error);
}

TEST(Umegaki, MatchesKullbackLeiblerOnDiagonals) {
  const std::vector<double> p{0.2, 0.5, 0.3}, q{0.4, 0.4, 0.2};
  EXPECT_NEAR(umegaki(DensityMatrix::diagonal(p), DensityMatrix::diagonal(q)).value, kl(p, q), 1e-13);
}

TEST(Umegaki, PureAgainstMaximallyMixed) {
  EXPECT_NEAR(umegaki(DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)).value, std::log(2.0),
              1e-14);
}

TEST(Umegaki, InfiniteOutsideSupport) {
  const auto v = umegaki(DensityMatrix::maximally_mixed(2), DensityMatrix::basis_state(2, 0));
  EXPECT_TRUE(std::isinf(v.value));
}

TEST(Umegaki, ZeroOnEqualArguments) {
  const DensityMatrix rho = sample_ginibre_state(3, 2, std::uint64_t{4});
  EXPECT_NEAR(umegaki(rho, rho).value, 0.0, 1e-12);
}

TEST(Umegaki, NearSingularFlag) {
  const DensityMatrix sigma = DensityMatrix::diagonal({1.0 - 1e-10, 1e-10});
  const DensityMatrix rho = DensityMatrix::diagonal({0.5, 0.5});
  const auto v = umegaki(rho, sigma);
  EXPECT_TRUE(v.finite());
  EXPECT_TRUE(v.near_singular);
}

TEST(BS, EqualsUmegakiOnCommutingPairs) {
  const std::vector<double> p{0.1, 0.6, 0.3}, q{0.3, 0.3, 0.4};
  const auto rho = DensityMatrix::diagonal(p), sigma = DensityMatrix::diagonal(q);
  EXPECT_NEAR(bs_entropy(rho, sigma).value, kl(p, q), 1e-13);
}

TEST(BS, DominatesUmegaki) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_ginibre_state(3, 3, trial_seed(1, s));
    const DensityMatrix sigma = sample_ginibre_state(3, 3, trial_seed(2, s));
    EXPECT_GE(bs_entropy(rho, sigma).value, umegaki(rho, sigma).value - 1e-9);
  }
}

TEST(BS, SigmaFormAgrees) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_ginibre_state(3, 1 + s % 3, trial_seed(3, s));
    const DensityMatrix sigma = sample_ginibre_state(3, 3, trial_seed(4, s));
    EXPECT_NEAR(bs_entropy(rho, sigma).value, bs_entropy_sigma_form(rho, sigma), 1e-9);
  }
}

TEST(BS, SigmaFormRejectsSingularSigma) {
  EXPECT_THROW(bs_entropy_sigma_form(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 0)),
               std::domain_error);
}

TEST(ConditionalEntropy, BellStateIsMinusLogTwo) {
  const auto layout = SubsystemLayout::lettered({2, 2});
  EXPECT_NEAR(conditional_entropy(bell(), layout, "B"), -std::log(2.0), 1e-13);
}

TEST(ConditionalEntropy, ProductStateEqualsMarginalEntropy) {
  const DensityMatrix a = sample_ginibre_state(2, 2, std::uint64_t{5});
  const DensityMatrix b = sample_ginibre_state(3, 3, std::uint64_t{6});
  const auto layout = SubsystemLayout::lettered({2, 3});
  EXPECT_NEAR(conditional_entropy(tensor(a, b), layout, "B"), von_neumann_entropy(a), 1e-12);
}

TEST(MutualInformation, BellAndProduct) {
  const auto layout = SubsystemLayout::lettered({2, 2});
  EXPECT_NEAR(mutual_information(bell(), layout), 2.0 * std::log(2.0), 1e-12);
  const DensityMatrix prod = tensor(sample_ginibre_state(2, 2, std::uint64_t{1}),
                                    sample_ginibre_state(2, 2, std::uint64_t{2}));
  EXPECT_NEAR(mutual_information(prod, layout), 0.0, 1e-12);
}

TEST(MutualInformation, EntropyIdentity) {
  const DensityMatrix rho = sample_ginibre_state(6, 6, std::uint64_t{9});
  const auto layout = SubsystemLayout::lettered({2, 3});
  const double sa = von_neumann_entropy(partial_trace(rho, layout, {"A"}));
  const double sb = von_neumann_entropy(partial_trace(rho, layout, {"B"}));
  EXPECT_NEAR(mutual_information(rho, layout), sa + sb - von_neumann_entropy(rho), 1e-12);
}

TEST(CMI, ZeroOnMarkovProduct) {
  const auto layout = SubsystemLayout::lettered({2, 2, 2});
  const DensityMatrix rho = tensor(sample_ginibre_state(2, 2, std::uint64_t{1}),
                                   sample_ginibre_state(4, 4, std::uint64_t{2}));
  EXPECT_NEAR(conditional_mutual_information(rho, layout, "A", "C", "B"), 0.0, 1e-12);
}

TEST(CMI, NonnegativeOnRandomStates) {
  const auto layout = SubsystemLayout::lettered({2, 2, 2});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_ginibre_state(8, 1 + s % 8, trial_seed(7, s));
    EXPECT_GE(conditional_mutual_information(rho, layout), -1e-10);
  }
}

TEST(BSConditional, FlagsSingularMarginal) {
  const auto layout = SubsystemLayout::lettered({2, 2});
  const DensityMatrix rho = tensor(DensityMatrix::maximally_mixed(2), DensityMatrix::basis_state(2, 0));
  const auto v = bs_conditional_entropy(rho, layout, "B");
  EXPECT_TRUE(v.singular_reference);
  EXPECT_NEAR(v.value, std::log(2.0), 1e-12);
}

TEST(BSConditional, ClassicalStateMatchesUmegaki) {
  const auto layout = SubsystemLayout::lettered({2, 2});
  const DensityMatrix rho = DensityMatrix::diagonal({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(bs_conditional_entropy(rho, layout, "B").value, conditional_entropy(rho, layout, "B"), 1e-12);
}
