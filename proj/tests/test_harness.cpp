#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "qcont/campaign.hpp"
#include "qcont/io.hpp"

using namespace qcont;

namespace {

// One entry per inequality or identity the library verifies.
const std::set<std::string> kDocumentedChecks = {
    "umegaki_nonneg",
    "bs_dominates_umegaki",
    "bs_commuting_equality",
    "bs_sigma_form",
    "operator_entropy_inequality",
    "umegaki_almost_concavity",
    "bs_almost_concavity",
    "tightness",
    "special_case_endpoint",
    "special_case_common_sigma_umegaki",
    "special_case_common_sigma_bs",
    "special_case_marginal_identity_umegaki",
    "special_case_marginal_identity_bs",
    "alpha_commuting",
    "alpha_c1_bound",
    "delta_states_distance",
    "omega_identity",
    "alaff_ce_continuity",
    "ce_continuity",
    "mi_continuity",
    "cmi_continuity",
    "divergence_bound_linear",
    "divergence_bound_sqrt",
    "second_input_continuity",
    "two_input_continuity",
    "bs_ce_continuity",
    "bs_mi_continuity",
    "markov_sandwich",
    "petz_recovery_trace",
    "uncertainty_relation",
    "dc_almost_affinity_umegaki",
    "dc_almost_affinity_bs",
    "dc_ree_bound",
    "bs_variational_ce",
};

std::string jsonl(const CampaignResult& r) {
  std::ostringstream os;
  write_jsonl(os, r.reports);
  return os.str();
}

}  // namespace

TEST(Registry, CoversDocumentedInequalities) {
  std::set<std::string> names;
  for (const auto& c : check_registry()) {
    EXPECT_TRUE(names.insert(c.name).second) << "duplicate check " << c.name;
    EXPECT_FALSE(c.inequality.empty()) << c.name;
    EXPECT_EQ(c.default_dims.size(), c.factors) << c.name;
  }
  EXPECT_EQ(names, kDocumentedChecks);
}

TEST(Registry, EveryCheckRunsCleanly) {
  for (const auto& c : check_registry()) {
    CampaignConfig cfg;
    cfg.check_name = c.name;
    cfg.trials = 2;
    cfg.threads = 1;
    if (c.needs_bs_constant) cfg.bs_constant = 100.0;
    const CampaignResult r = run_campaign(cfg);
    ASSERT_EQ(r.reports.size(), 2u) << c.name;
    for (const auto& rep : r.reports) {
      EXPECT_TRUE(rep.note.rfind("error", 0) != 0) << c.name << ": " << rep.note;
      EXPECT_EQ(rep.bound_name, c.name);
    }
    EXPECT_TRUE(r.summary.all_passed()) << c.name << " worst margin " << r.summary.worst_margin;
  }
}

TEST(Registry, UnknownCheckIsRejected) { EXPECT_THROW(find_check("no_such_check"), std::invalid_argument); }

TEST(Campaign, SingleIdenticalTrialHasZeroMargin) {
  CampaignConfig cfg;
  cfg.check_name = "umegaki_nonneg";
  cfg.trials = 1;
  cfg.sampler = SamplerKind::identical;
  const CampaignResult r = run_campaign(cfg);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_TRUE(r.reports[0].pass);
  EXPECT_NEAR(r.reports[0].margin, 0.0, 1e-12);
}

TEST(Campaign, ByteIdenticalAcrossRunsAndThreadCounts) {
  CampaignConfig cfg;
  cfg.check_name = "umegaki_almost_concavity";
  cfg.trials = 12;
  cfg.threads = 1;
  const std::string a = jsonl(run_campaign(cfg));
  const std::string b = jsonl(run_campaign(cfg));
  cfg.threads = 3;
  const std::string c = jsonl(run_campaign(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  cfg.seed = 43;
  EXPECT_NE(a, jsonl(run_campaign(cfg)));
}

TEST(Campaign, ExactTrialCountAndSummary) {
  CampaignConfig cfg;
  cfg.check_name = "ce_continuity";
  cfg.trials = 17;
  const CampaignResult r = run_campaign(cfg);
  EXPECT_EQ(r.reports.size(), 17u);
  EXPECT_EQ(r.summary.trials, 17u);
  EXPECT_EQ(r.summary.passed, 17u);
  EXPECT_GT(r.summary.max_ratio, 0.0);
  EXPECT_LE(r.summary.max_ratio, 1.0 + 1e-8);
  const auto j = to_json(r.summary);
  EXPECT_EQ(j["failed"], 0);
}

TEST(Campaign, ConfigValidation) {
  CampaignConfig cfg;
  cfg.check_name = "bs_almost_concavity";
  cfg.trials = 0;
  EXPECT_THROW(run_campaign(cfg), std::invalid_argument);
  cfg.trials = 1;
  cfg.sampler = SamplerKind::pure;  // BS checks need full-rank states
  EXPECT_THROW(run_campaign(cfg), std::invalid_argument);
  cfg.sampler = SamplerKind::min_eig_floor;
  cfg.floor = 0.5;
  EXPECT_THROW(run_campaign(cfg), std::invalid_argument);
  cfg.dims = {2, 2};
  cfg.floor = 0.05;
  EXPECT_THROW(run_campaign(cfg), std::invalid_argument);

  CampaignConfig bs;
  bs.check_name = "bs_ce_continuity";
  bs.trials = 1;
  EXPECT_THROW(run_campaign(bs), std::invalid_argument);
  bs.bs_constant = 1.0;
  EXPECT_NO_THROW(run_campaign(bs));
}

TEST(Campaign, SmallestPassingConstantScalesWithRatio) {
  CampaignConfig cfg;
  cfg.check_name = "bs_ce_continuity";
  cfg.trials = 20;
  cfg.bs_constant = 1.0;
  const auto a = run_campaign(cfg).summary;
  cfg.bs_constant = 10.0;
  const auto b = run_campaign(cfg).summary;
  ASSERT_TRUE(a.smallest_passing_constant && b.smallest_passing_constant);
  EXPECT_NEAR(*a.smallest_passing_constant, *b.smallest_passing_constant, 1e-12);
}

TEST(Sampling, RankOneIsPure) {
  EXPECT_NEAR(von_neumann_entropy(sample_ginibre_state(4, 1, std::uint64_t{1})), 0.0, 1e-10);
}

TEST(Sampling, FullRankAndRequestedRank) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_TRUE(is_full_rank(sample_ginibre_state(4, 4, trial_seed(61, s)).op()));
    EXPECT_EQ(numerical_rank(sample_ginibre_state(5, 3, trial_seed(62, s)).op()), 3);
  }
  EXPECT_THROW(sample_ginibre_state(3, 4, std::uint64_t{1}), std::invalid_argument);
  EXPECT_THROW(sample_ginibre_state(3, 0, std::uint64_t{1}), std::invalid_argument);
}

TEST(Sampling, SameSeedSameState) {
  EXPECT_EQ(sample_ginibre_state(3, 2, std::uint64_t{99}).matrix(), sample_ginibre_state(3, 2, std::uint64_t{99}).matrix());
  EXPECT_NE(trial_seed(42, 0), trial_seed(42, 1));
  EXPECT_NE(trial_seed(42, 0), trial_seed(43, 0));
}

TEST(Sampling, MinEigenvalueFloor) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_min_eig_floor(4, 0.05, trial_seed(63, s));
    EXPECT_GE(min_eigenvalue(rho.op()), 0.05 - 1e-12);
    EXPECT_NEAR(rho.op().trace(), 1.0, 1e-14);
  }
  const DensityMatrix near = sample_min_eig_floor(4, 0.25 - 1e-9, std::uint64_t{1});
  EXPECT_LT(max_abs(near.matrix() - 0.25 * Matrix::Identity(4, 4)), 1e-8);
  EXPECT_THROW(sample_min_eig_floor(4, 0.25, std::uint64_t{1}), std::invalid_argument);
}

TEST(Sampling, DominatingStateContainsSupport) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(trial_seed(64, s));
    const DensityMatrix rho = sample_mixed_rank(4, rng);
    EXPECT_TRUE(kernel_included(sample_dominating(rho, rng).op(), rho.op()));
  }
}

TEST(Io, MatrixJsonRoundTrip) {
  const Matrix m = sample_ginibre_state(3, 3, std::uint64_t{5}).matrix();
  const Matrix back = io::matrix_from_json(io::matrix_to_json(m));
  EXPECT_EQ(back, m);
  EXPECT_THROW(io::matrix_from_json(nlohmann::json{{"dim", 2}, {"re", {1, 0, 0}}}), std::invalid_argument);
}

TEST(Io, LayoutJsonRoundTrip) {
  const auto l = SubsystemLayout({"A", "M"}, {2, 3});
  const auto back = io::layout_from_json(io::layout_to_json(l));
  EXPECT_EQ(back.labels(), l.labels());
  EXPECT_EQ(back.dims(), l.dims());
}

TEST(Reports, CsvHasHeaderAndOneLinePerReport) {
  std::ostringstream os;
  write_csv(os, {BoundReport::upper("x", "fp", 0.1, 1.0, 2.0), BoundReport::upper("x", "fp", 0.2, 3.0, 2.0)});
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
  EXPECT_EQ(s.rfind("bound_name,", 0), 0u);
  EXPECT_NE(s.find("false"), std::string::npos);
}

TEST(Reports, SandwichMarginIsDistanceToNearerSide) {
  const auto r = BoundReport::sandwich("s", "fp", 0.0, -1.0, 0.25, 0.5);
  EXPECT_DOUBLE_EQ(r.margin, 0.25);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(BoundReport::sandwich("s", "fp", 0.0, -1.0, 0.6, 0.5).pass);
}
