#pragma once

// z-test for zero additive interaction and the linearity bonds implied by
// mean-dichotomized linear mediation.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cloglin/causal.hpp"
#include "cloglin/errors.hpp"
#include "cloglin/loglin_fit.hpp"

namespace cloglin {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// 2 (1 - Phi(|z|)) without cancellation in the upper tail.
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

struct TestResult {
  double beta_hat = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_two_sided = 1.0;
  std::string combination;
};

inline constexpr const char* kAdditiveZeroConstraint = "lambda_ZY + 2*lambda_Y + lambda_XY = 0";

// Var(lZY + 2 lY + lXY) written out term by term.
inline double additive_contrast_variance_expanded(const FitResult& fit) {
  auto c = [&](VarSet a, VarSet b) {
    const auto v = fit.covariance_of(a, b);
    if (!v) throw InputError("covariance missing term " + a.name() + " or " + b.name());
    return *v;
  };
  using namespace term;
  return c(ZY, ZY) + 4.0 * c(Y, Y) + c(XY, XY) + 4.0 * c(ZY, Y) + 2.0 * c(ZY, XY) + 4.0 * c(XY, Y);
}

inline TestResult additive_zero_test(const FitResult& fit) {
  if (fit.spec.with_three_way())
    throw InputError("additive-interaction test is defined for the two-way model");
  if (fit.covariance.size() == 0) throw InputError("fit carries no covariance matrix");

  Eigen::VectorXd contrast = Eigen::VectorXd::Zero(fit.covariance.rows());
  const std::pair<VarSet, double> weights[] = {{term::Y, 2.0}, {term::XY, 1.0}, {term::ZY, 1.0}};
  for (const auto& [t, w] : weights) {
    const auto col = fit.spec.column(t);
    if (!col) throw InputError("model lacks term " + t.name());
    contrast(static_cast<Eigen::Index>(*col)) = w;
  }
  const double variance = contrast.dot(fit.covariance * contrast);
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw FitError("covariance is not positive on the additive-interaction contrast");

  TestResult r;
  r.combination = kAdditiveZeroConstraint;
  r.beta_hat = fit.params.lambda(term::ZY) + 2.0 * fit.params.lambda(term::Y) + fit.params.lambda(term::XY);
  r.se = std::sqrt(variance);
  r.z = r.beta_hat / r.se;
  r.p_two_sided = two_sided_p(r.z);
  return r;
}

struct LinearityReport {
  double bond1_residual = 0.0;  // log(mu^XY (mu^Y)^2 mu^ZY)
  double bond2_residual = 0.0;  // log(mu_c^XZ (mu_c^Z)^2)
  std::optional<TestResult> bond1_test;
};

// Bond 2 lives on the XZ-margin fit and is reported without a test.
inline LinearityReport linearity_bonds(const CausalParams& cp, const FitResult* fit = nullptr) {
  if (cp.with_interaction) throw InputError("linearity bonds apply to the model without interaction");
  cp.check();
  LinearityReport r;
  r.bond1_residual = std::log(cp.xy) + 2.0 * std::log(cp.y) + std::log(cp.zy);
  r.bond2_residual = std::log(cp.xz_c) + 2.0 * std::log(cp.z_c);
  if (fit) r.bond1_test = additive_zero_test(*fit);
  return r;
}

}  // namespace cloglin
