#include <gtest/gtest.h>

#include <cmath>

#include "cloglin/hypothesis.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cloglin;
using cloglin::testkit::Rng;

namespace {

// Two-way lambdas with lZY + 2 lY + lXY = 0.
std::array<double, kTerms> additive_zero_lambda(Rng& rng, double log_eta) {
  auto l = testkit::random_lambda(rng, false, log_eta);
  l[term_position(term::ZY)] = -2.0 * l[term_position(term::Y)] - l[term_position(term::XY)];
  return l;
}

}  // namespace

TEST(NormalTail, KnownValues) {
  EXPECT_NEAR(two_sided_p(0.4174), 0.676386, 1e-6);
  EXPECT_NEAR(two_sided_p(1.959963984540054), 0.05, 1e-12);
  EXPECT_EQ(two_sided_p(0.0), 1.0);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-12);
  // Deep tail stays accurate instead of cancelling to 0.
  EXPECT_NEAR(two_sided_p(10.0) / 1.523970604832105e-23, 1.0, 1e-10);
}

TEST(NormalTail, MonotoneAndSymmetric) {
  double prev = 1.0;
  for (double z = 0.1; z < 8.0; z += 0.1) {
    const double p = two_sided_p(z);
    EXPECT_LT(p, prev);
    EXPECT_EQ(p, two_sided_p(-z));
    prev = p;
  }
}

TEST(AdditiveZeroTest, ExactConstraintGivesZeroStatistic) {
  Rng rng(307);
  for (int i = 0; i < 30; ++i) {
    const auto t = testkit::table_from_lambda(additive_zero_lambda(rng, std::log(100.0)));
    const auto r = additive_zero_test(fit_poisson(t, ModelSpec::two_way()));
    EXPECT_LT(std::abs(r.z), 1e-6);
    EXPECT_GT(r.p_two_sided, 0.999999);
    EXPECT_EQ(r.combination, kAdditiveZeroConstraint);
  }
}

TEST(AdditiveZeroTest, ScalingCountsShrinksStandardError) {
  Rng rng(311);
  for (int i = 0; i < 20; ++i) {
    const auto t = testkit::random_table(rng);
    const auto small = additive_zero_test(fit_poisson(t, ModelSpec::two_way()));
    const auto large = additive_zero_test(fit_poisson(t.scaled(100.0), ModelSpec::two_way()));
    EXPECT_NEAR(large.se / small.se, 0.1, 0.002);
    EXPECT_NEAR(large.beta_hat, small.beta_hat, 1e-8);
    EXPECT_NEAR(large.z, 10.0 * small.z, 1e-6 * std::max(1.0, std::abs(large.z)));
  }
}

TEST(AdditiveZeroTest, ContrastVarianceMatchesExpansion) {
  Rng rng(313);
  for (int i = 0; i < 30; ++i) {
    const auto fit = fit_poisson(testkit::random_table(rng), ModelSpec::two_way());
    const auto r = additive_zero_test(fit);
    const double v = additive_contrast_variance_expanded(fit);
    EXPECT_NEAR(r.se * r.se, v, 1e-12 * v);
    EXPECT_TRUE(std::isfinite(r.z));
    EXPECT_GT(r.p_two_sided, 0.0);
    EXPECT_LE(r.p_two_sided, 1.0);
    EXPECT_NEAR(r.p_two_sided, two_sided_p(r.beta_hat / r.se), 1e-15);
  }
}

TEST(AdditiveZeroTest, SignFollowsEstimate) {
  Rng rng(317);
  auto l = testkit::random_lambda(rng, false, std::log(200.0));
  l[term_position(term::ZY)] = -2.0 * l[term_position(term::Y)] - l[term_position(term::XY)] + 0.3;
  const auto up = additive_zero_test(fit_poisson(testkit::table_from_lambda(l), ModelSpec::two_way()));
  l[term_position(term::ZY)] -= 0.6;
  const auto down = additive_zero_test(fit_poisson(testkit::table_from_lambda(l), ModelSpec::two_way()));
  EXPECT_NEAR(up.beta_hat, 0.3, 1e-8);
  EXPECT_NEAR(down.beta_hat, -0.3, 1e-8);
  EXPECT_GT(up.z, 0.0);
  EXPECT_LT(down.z, 0.0);
}

TEST(AdditiveZeroTest, RejectsSaturatedFit) {
  Rng rng(331);
  EXPECT_THROW(additive_zero_test(fit_poisson(testkit::random_table(rng), ModelSpec::saturated())), InputError);
}

TEST(LinearityBonds, FirstDatasetResiduals) {
  const auto b = linearity_bonds(testkit::first_dataset());
  EXPECT_NEAR(b.bond1_residual, std::log(1.9240) + 2.0 * std::log(0.4881) + std::log(2.4038), 1e-14);
  EXPECT_NEAR(b.bond2_residual, std::log(3.3059) + 2.0 * std::log(0.4659), 1e-14);
  EXPECT_FALSE(b.bond1_test.has_value());
}

TEST(LinearityBonds, ExactBondsGiveZeroResiduals) {
  CausalParams cp;
  cp.y = 0.5;
  cp.xy = 3.0;
  cp.zy = 1.0 / (0.25 * 3.0);
  cp.z_c = 0.8;
  cp.xz_c = 1.0 / 0.64;
  const auto b = linearity_bonds(cp);
  EXPECT_NEAR(b.bond1_residual, 0.0, 1e-14);
  EXPECT_NEAR(b.bond2_residual, 0.0, 1e-14);
}

TEST(LinearityBonds, Bond1TestMatchesResidualOfTheFit) {
  Rng rng(337);
  const auto fit = fit_poisson(testkit::random_table(rng), ModelSpec::two_way());
  const auto b = linearity_bonds(causal_from_nocausal(fit.params), &fit);
  ASSERT_TRUE(b.bond1_test.has_value());
  EXPECT_NEAR(b.bond1_test->beta_hat, b.bond1_residual, 1e-12);
}

TEST(LinearityBonds, RejectsInteractionModel) {
  EXPECT_THROW(linearity_bonds(testkit::second_dataset()), InputError);
}
