#include <gtest/gtest.h>

#include <cmath>

#include "cloglin/loglin_fit.hpp"
#include "support/brute_force.hpp"
#include "support/generators.hpp"

using namespace cloglin;
using cloglin::testkit::Rng;

namespace {

Eigen::VectorXd beta_of(const FitResult& fit) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(fit.spec.columns()));
  b(0) = fit.params.lambda(term::eta);
  for (std::size_t j = 0; j < fit.spec.terms().size(); ++j)
    b(static_cast<Eigen::Index>(j + 1)) = fit.params.lambda(fit.spec.terms()[j]);
  return b;
}

}  // namespace

TEST(ModelSpec, CanonicalTermsAndHierarchy) {
  const auto two = ModelSpec::two_way();
  ASSERT_EQ(two.columns(), 7u);
  EXPECT_FALSE(two.with_three_way());
  EXPECT_EQ(two.terms()[3], term::XZ);
  EXPECT_EQ(ModelSpec::saturated().columns(), 8u);

  // Terms given out of order come back canonical.
  const ModelSpec shuffled(term::XZY, {term::ZY, term::XY, term::XZ});
  EXPECT_EQ(shuffled.terms(), two.terms());

  EXPECT_THROW(ModelSpec(term::XZY, {term::XZY}), InputError);
  EXPECT_THROW(ModelSpec(term::XY, {term::XZ}), InputError);
}

TEST(DesignMatrix, TwoByTwoIndependence) {
  const ModelSpec spec(VarSet{Var::X, Var::Y}, {});
  Eigen::MatrixXd expected(4, 3);
  expected << 1, 0, 0,  //
      1, 0, 1,          //
      1, 1, 0,          //
      1, 1, 1;
  EXPECT_EQ(design_matrix(spec), expected);
}

TEST(DesignMatrix, TwoWayShape) {
  const auto d = design_matrix(ModelSpec::two_way());
  EXPECT_EQ(d.rows(), 8);
  EXPECT_EQ(d.cols(), 7);
  // Row (1,1,1) has every column on; row (0,1,1) has eta, Z, Y, ZY.
  EXPECT_EQ(d.row(7).sum(), 7.0);
  Eigen::RowVectorXd r3(7);
  r3 << 1, 0, 1, 1, 0, 0, 1;
  EXPECT_EQ(d.row(3), r3);
}

TEST(DesignMatrix, SaturatedIsFullRank) {
  const auto d = design_matrix(ModelSpec::saturated());
  EXPECT_EQ(d.rows(), 8);
  EXPECT_EQ(d.cols(), 8);
  EXPECT_EQ(testkit::rank_by_elimination(d), 8);
  EXPECT_EQ(testkit::rank_by_elimination(design_matrix(ModelSpec::two_way())), 7);
}

TEST(FitPoisson, UniformTable) {
  std::array<double, kCells> c{};
  c.fill(10.0);
  const auto fit = fit_poisson(ContingencyTable(c), ModelSpec::two_way());
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.params.eta(), 10.0, 1e-10);
  for (VarSet t : fit.spec.terms()) EXPECT_NEAR(fit.params.mu(t), 1.0, 1e-10);
  EXPECT_NEAR(fit.deviance, 0.0, 1e-12);
}

TEST(FitPoisson, SaturatedReproducesCounts) {
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    const auto t = testkit::random_table(rng);
    const auto fit = fit_poisson(t, ModelSpec::saturated());
    for (std::size_t k = 0; k < kCells; ++k) EXPECT_NEAR(fit.fitted_counts[k], t[k], 1e-9 * t[k]);
    EXPECT_NEAR(fit.deviance, 0.0, 1e-9);
  }
}

TEST(FitPoisson, RecoversGeneratingParameters) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    for (bool three_way : {false, true}) {
      const auto lambda = testkit::random_lambda(rng, three_way);
      const auto fit =
          fit_poisson(testkit::table_from_lambda(lambda), three_way ? ModelSpec::saturated() : ModelSpec::two_way());
      for (std::size_t k = 0; k < kTerms; ++k) EXPECT_NEAR(fit.params.additive()[k], lambda[k], 1e-8);
    }
  }
}

TEST(FitPoisson, ScoreEquationsHoldAtConvergence) {
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    const auto t = testkit::random_table(rng);
    for (const auto& spec : {ModelSpec::two_way(), ModelSpec::saturated()}) {
      const auto fit = fit_poisson(t, spec);
      const auto d = design_matrix(spec);
      Eigen::VectorXd resid(8);
      for (std::size_t k = 0; k < kCells; ++k) resid(static_cast<Eigen::Index>(k)) = t[k] - fit.fitted_counts[k];
      EXPECT_LT((d.transpose() * resid).cwiseAbs().maxCoeff(), 1e-8 * t.total());
    }
  }
}

TEST(FitPoisson, TwoWayFittedCrossRatioIsOne) {
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const auto fit = fit_poisson(testkit::random_table(rng), ModelSpec::two_way());
    const auto& m = fit.fitted_counts;
    const double log_cross = std::log(m[7]) + std::log(m[4]) + std::log(m[2]) + std::log(m[1]) - std::log(m[6]) -
                             std::log(m[5]) - std::log(m[3]) - std::log(m[0]);
    EXPECT_NEAR(log_cross, 0.0, 1e-8);
  }
}

TEST(FitPoisson, CovarianceMatchesFiniteDifferenceHessian) {
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const auto t = testkit::random_table(rng);
    for (const auto& spec : {ModelSpec::two_way(), ModelSpec::saturated()}) {
      const auto fit = fit_poisson(t, spec);
      const Eigen::MatrixXd fd_cov = (-testkit::fd_hessian(t, design_matrix(spec), beta_of(fit))).inverse();
      ASSERT_EQ(fd_cov.rows(), fit.covariance.rows());
      for (Eigen::Index a = 0; a < fd_cov.rows(); ++a)
        for (Eigen::Index b = 0; b < fd_cov.cols(); ++b)
          EXPECT_NEAR(fit.covariance(a, b), fd_cov(a, b), 1e-4 * std::sqrt(fd_cov(a, a) * fd_cov(b, b)));
      // Symmetric positive definite.
      EXPECT_LT((fit.covariance - fit.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(fit.covariance).info(), Eigen::Success);
    }
  }
}

TEST(FitPoisson, ZeroMarginDiverges) {
  // No X=1,Y=1 observations: the XY term runs off to -infinity.
  const ContingencyTable t({10, 12, 8, 9, 11, 0, 7, 0});
  EXPECT_THROW(fit_poisson(t, ModelSpec::two_way()), FitError);
  // Saturated model with one empty cell.
  EXPECT_THROW(fit_poisson(ContingencyTable({10, 12, 8, 9, 11, 6, 7, 0}), ModelSpec::saturated()), FitError);
}

TEST(FitPoisson, IterationCapReported) {
  FitControl control;
  control.max_iterations = 1;
  Rng rng(2);
  EXPECT_THROW(fit_poisson(testkit::random_table(rng), ModelSpec::two_way(), control), FitError);
}

TEST(SaturatedClosedForm, Uniform) {
  std::array<double, kCells> c{};
  c.fill(4.0);
  const auto p = saturated_closed_form(ContingencyTable(c));
  EXPECT_DOUBLE_EQ(p.eta(), 4.0);
  for (std::size_t k = 1; k < kTerms; ++k) EXPECT_DOUBLE_EQ(p.multiplicative()[k], 1.0);
}

TEST(SaturatedClosedForm, SingleTwoWayTerm) {
  // eta = 10, mu^{XY} = 2: cells with x = y = 1 doubled.
  const ContingencyTable t({10, 10, 10, 10, 10, 20, 10, 20});
  const auto p = saturated_closed_form(t);
  EXPECT_DOUBLE_EQ(p.mu(term::XY), 2.0);
  EXPECT_DOUBLE_EQ(p.mu(term::XZY), 1.0);
  EXPECT_DOUBLE_EQ(p.mu(term::ZY), 1.0);
}

TEST(SaturatedClosedForm, AgreesWithIrls) {
  Rng rng(19);
  for (int i = 0; i < 30; ++i) {
    const auto t = testkit::random_table(rng);
    const auto closed = saturated_closed_form(t);
    const auto fit = fit_poisson(t, ModelSpec::saturated());
    for (std::size_t k = 0; k < kTerms; ++k) EXPECT_NEAR(closed.additive()[k], fit.params.additive()[k], 1e-8);
  }
}

TEST(SaturatedClosedForm, RejectsZeroCell) {
  EXPECT_THROW(saturated_closed_form(ContingencyTable({1, 1, 1, 1, 1, 1, 1, 0})), InputError);
}

TEST(MultiplicativeFromAdditive, Basics) {
  const auto zero = multiplicative_from_additive({});
  for (double m : zero.multiplicative()) EXPECT_EQ(m, 1.0);

  std::array<double, kTerms> l{};
  l[term_position(term::XY)] = std::log(2.0);
  EXPECT_NEAR(multiplicative_from_additive(l).mu(term::XY), 2.0, 1e-15);

  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto lambda = testkit::random_lambda(rng, true, testkit::uniform(rng, -3, 3));
    const auto back = additive_from_multiplicative(multiplicative_from_additive(lambda).multiplicative());
    for (std::size_t k = 0; k < kTerms; ++k) EXPECT_NEAR(back.additive()[k], lambda[k], 1e-12);
  }
}

TEST(ExpectedCounts, MatchTableOneProducts) {
  Rng rng(6);
  const auto lambda = testkit::random_lambda(rng, true);
  const auto m = expected_counts(NoCausalParams(lambda));
  const auto t = testkit::table_from_lambda(lambda);
  for (std::size_t k = 0; k < kCells; ++k) EXPECT_NEAR(m[k], t[k], 1e-12 * t[k]);
}
