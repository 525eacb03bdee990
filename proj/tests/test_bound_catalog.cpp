#include <cmath>

#include <gtest/gtest.h>

#include "qcont/bound_catalog.hpp"
#include "qcont/sampling.hpp"

using namespace qcont;

TEST(Catalog, ClosedFormValuesAtEpsilonOne) {
  const double l2 = std::log(2.0);
  EXPECT_NEAR(ce_bound(1.0, 2), 4.0 * l2, 1e-14);
  EXPECT_NEAR(mi_bound(1.0, 2, 5), 6.0 * l2, 1e-14);
  EXPECT_NEAR(cmi_bound(1.0, 3, 2), 6.0 * l2, 1e-14);
  EXPECT_NEAR(divergence_bound_linear(1.0, 0.5), 3.0 * l2, 1e-14);
  EXPECT_NEAR(divergence_bound_sqrt(0.5, std::exp(-1.0)), 1.0 + 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Catalog, RejectsBadEpsilon) {
  EXPECT_THROW(ce_bound(-0.1, 2), std::domain_error);
  EXPECT_THROW(mi_bound(1.5, 2, 2), std::domain_error);
}

TEST(DivergenceBound, ChainOnRandomPairs) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(trial_seed(41, s));
    const DensityMatrix rho = sample_mixed_rank(3, rng);
    const DensityMatrix sigma = sample_dominating(rho, rng);
    const DivergenceBound b = divergence_bound(rho, sigma);
    EXPECT_LE(umegaki(rho, sigma).value, b.linear + 1e-8);
    EXPECT_LE(b.linear, b.sqrt_form + 1e-8);
  }
}

TEST(DivergenceBound, UsesSmallestNonzeroEigenvalue) {
  const DensityMatrix sigma = DensityMatrix::diagonal({0.0, 0.25, 0.75});
  const DensityMatrix rho = DensityMatrix::diagonal({0.0, 0.5, 0.5});
  EXPECT_NEAR(divergence_bound(rho, sigma).m_tilde, 0.25, 1e-14);
  EXPECT_THROW(divergence_bound(DensityMatrix::maximally_mixed(3), sigma), std::domain_error);
}

TEST(Domination, MaxConstantClosedForm) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const DensityMatrix sigma = DensityMatrix::diagonal({0.25, 0.75});
  EXPECT_NEAR(max_domination_constant(rho, sigma), 0.5, 1e-14);
  EXPECT_NEAR(campaign_m_tilde({&rho}, {&sigma}), 0.45, 1e-14);
}

TEST(Domination, CampaignConstantIsAdmissible) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(trial_seed(42, s));
    const DensityMatrix r = sample_ginibre_state(3, 3, rng);
    const DensityMatrix s1 = sample_ginibre_state(3, 3, rng), s2 = sample_ginibre_state(3, 3, rng);
    const double m = campaign_m_tilde({&r}, {&s1, &s2});
    EXPECT_TRUE(psd_dominates(s1.op(), HermitianOperator::unchecked(m * r.matrix()), 1e-12));
    EXPECT_TRUE(psd_dominates(s2.op(), HermitianOperator::unchecked(m * r.matrix()), 1e-12));
  }
}

TEST(SecondInput, HoldsAndNamesViolator) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(trial_seed(43, s));
    const DensityMatrix r = sample_ginibre_state(3, 3, rng);
    const DensityMatrix s1 = sample_ginibre_state(3, 3, rng), s2 = sample_ginibre_state(3, 3, rng);
    const double m = campaign_m_tilde({&r}, {&s1, &s2});
    EXPECT_LE(std::abs(umegaki(r, s1).value - umegaki(r, s2).value), second_input_bound(r, s1, s2, m) + 1e-8);
  }
  const DensityMatrix r = DensityMatrix::diagonal({0.5, 0.5});
  const DensityMatrix ok = DensityMatrix::diagonal({0.4, 0.6});
  const DensityMatrix bad = DensityMatrix::diagonal({0.01, 0.99});
  try {
    second_input_bound(r, ok, bad, 0.5);
    FAIL() << "expected a domination error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("sigma_2"), std::string::npos) << e.what();
  }
}

TEST(SecondInput, RejectsMTildeOutOfRange) {
  const DensityMatrix r = DensityMatrix::maximally_mixed(2);
  EXPECT_THROW(second_input_bound(r, r, r, 1.0), std::domain_error);
  EXPECT_THROW(second_input_bound(r, r, r, 0.0), std::domain_error);
}

TEST(TwoInput, HoldsOnRandomSamples) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(trial_seed(44, s));
    const DensityMatrix r1 = sample_ginibre_state(3, 3, rng), r2 = sample_ginibre_state(3, 3, rng);
    const DensityMatrix s1 = sample_ginibre_state(3, 3, rng), s2 = sample_ginibre_state(3, 3, rng);
    const double m = campaign_m_tilde({&r1, &r2}, {&s1, &s2});
    EXPECT_LE(std::abs(umegaki(r1, s1).value - umegaki(r2, s2).value), two_input_bound(r1, r2, s1, s2, m) + 1e-8);
  }
}

TEST(BsQuantity, ShapeAndDomain) {
  EXPECT_NEAR(bs_quantity_bound(0.04, 0.05, 4, 1.0), 0.2 / (0.05 * 0.2), 1e-12);
  EXPECT_THROW(bs_quantity_bound(0.04, 0.25, 4, 1.0), std::domain_error);
}
