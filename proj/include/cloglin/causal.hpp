#pragma once

// Causal loglinear model P(X) P(Z|X) P(Y|X,Z) for the ordering X -> Z -> Y.
//
//   pi(X=x)         = eta_c^X            mu_c^{X=x}
//   pi(Z=z|X=x)     = eta_c^{Z|X=x}      mu_c^{Z=z} mu_c^{X=x,Z=z}
//   pi(Y=y|X=x,Z=z) = eta^{Y|X=x,Z=z}    mu^{Y=y} mu^{X=x,Y=y} mu^{Z=z,Y=y} [mu^{X=x,Z=z,Y=y}]
//
// The Y-block parameters coincide with the no-causal ones; the X and Z
// blocks carry the causal subscript c.

#include <array>
#include <cmath>
#include <string>

#include "cloglin/errors.hpp"
#include "cloglin/loglin_fit.hpp"
#include "cloglin/table.hpp"

namespace cloglin {

// Multiplicative values at level 1 (dummy code); level-0 values are 1.
struct CausalParams {
  double x_c = 1.0;   // mu_c^{X=1}
  double z_c = 1.0;   // mu_c^{Z=1}
  double xz_c = 1.0;  // mu_c^{X=1,Z=1}
  double y = 1.0;     // mu^{Y=1}
  double xy = 1.0;    // mu^{X=1,Y=1}
  double zy = 1.0;    // mu^{Z=1,Y=1}
  double xzy = 1.0;   // mu^{X=1,Z=1,Y=1}
  bool with_interaction = false;

  void check() const {
    for (double v : {x_c, z_c, xz_c, y, xy, zy, xzy})
      if (!(v > 0.0) || !std::isfinite(v)) throw InputError("causal parameters must be positive and finite");
    if (!with_interaction && xzy != 1.0)
      throw InputError("three-way parameter must equal 1 in the model without interaction");
  }

  // mu^{Y=1} mu^{X=x,Y=1} mu^{Z=z,Y=1} mu^{X=x,Z=z,Y=1}
  double y_weight(int x, int z) const {
    double w = y;
    if (x == 1) w *= xy;
    if (z == 1) w *= zy;
    if (x == 1 && z == 1) w *= xzy;
    return w;
  }
  // mu_c^{Z=1} mu_c^{X=x,Z=1}
  double z_weight(int x) const { return x == 1 ? z_c * xz_c : z_c; }
};

struct NormalizationFactors {
  double x_c = 0.5;
  std::array<double, 2> z_given_x{0.5, 0.5};
  std::array<std::array<double, 2>, 2> y_given_xz{{{0.5, 0.5}, {0.5, 0.5}}};  // [x][z]
};

inline NormalizationFactors eta_factors(const CausalParams& cp) {
  NormalizationFactors f;
  f.x_c = 1.0 / (1.0 + cp.x_c);
  for (int x = 0; x < 2; ++x) {
    f.z_given_x[x] = 1.0 / (1.0 + cp.z_weight(x));
    for (int z = 0; z < 2; ++z) f.y_given_xz[x][z] = 1.0 / (1.0 + cp.y_weight(x, z));
  }
  return f;
}

struct CausalDecomposition {
  std::array<double, 2> x{};
  std::array<std::array<double, 2>, 2> z_given_x{};                 // [x][z]
  std::array<std::array<std::array<double, 2>, 2>, 2> y_given_xz{};  // [x][z][y]

  JointProbabilityTable joint() const {
    std::array<double, kCells> probs{};
    for (std::size_t i = 0; i < kCells; ++i) {
      const Cell c = cell_at(i);
      probs[i] = x[c.x] * z_given_x[c.x][c.z] * y_given_xz[c.x][c.z][c.y];
    }
    return JointProbabilityTable(probs);
  }
};

inline CausalDecomposition conditional_probabilities(const CausalParams& cp) {
  cp.check();
  const NormalizationFactors f = eta_factors(cp);
  CausalDecomposition d;
  d.x = {f.x_c, f.x_c * cp.x_c};
  for (int x = 0; x < 2; ++x) {
    d.z_given_x[x] = {f.z_given_x[x], f.z_given_x[x] * cp.z_weight(x)};
    for (int z = 0; z < 2; ++z)
      d.y_given_xz[x][z] = {f.y_given_xz[x][z], f.y_given_xz[x][z] * cp.y_weight(x, z)};
  }
  return d;
}

inline CausalParams fit_causal(const ContingencyTable& table, bool with_interaction, const FitControl& control = {}) {
  CausalParams cp;
  cp.with_interaction = with_interaction;

  std::array<std::array<double, 2>, 2> xz{};
  for (std::size_t i = 0; i < kCells; ++i) xz[cell_at(i).x][cell_at(i).z] += table[i];
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z)
      if (!(xz[x][z] > 0.0))
        throw InputError("XZ margin cell (x=" + std::to_string(x) + ", z=" + std::to_string(z) + ") is zero");

  // Bernoulli margin of X; saturated logit of Z on X.
  cp.x_c = (xz[1][0] + xz[1][1]) / (xz[0][0] + xz[0][1]);
  cp.z_c = xz[0][1] / xz[0][0];
  cp.xz_c = (xz[1][1] * xz[0][0]) / (xz[1][0] * xz[0][1]);

  if (with_interaction) {
    const NoCausalParams sat = saturated_closed_form(table);
    cp.y = sat.mu(term::Y);
    cp.xy = sat.mu(term::XY);
    cp.zy = sat.mu(term::ZY);
    cp.xzy = sat.mu(term::XZY);
  } else {
    // The Poisson likelihood of the two-way model factorizes into the XZ
    // margin and the no-three-way logit of Y on X, Z; its Y terms are the
    // logit MLE.
    const FitResult fit = fit_poisson(table, ModelSpec::two_way(), control);
    cp.y = fit.params.mu(term::Y);
    cp.xy = fit.params.mu(term::XY);
    cp.zy = fit.params.mu(term::ZY);
  }
  cp.check();
  return cp;
}

// Without the three-way term,
//   mu_c^{Z=1}     = mu^{Z=1}     eta^{Y|0,0} / eta^{Y|0,1}
//   mu_c^{X=1,Z=1} = mu^{X=1,Z=1} eta^{Y|1,0} eta^{Y|0,1} / (eta^{Y|0,0} eta^{Y|1,1})
// and mu_c^{X=1} follows from summing the joint over Z and Y:
//   pi(X=x) ∝ mu^{X=x} sum_z mu^{Z=z} mu^{X=x,Z=z} / eta^{Y|x,z}
// so mu_c^{X=1} = mu^{X=1} (1/eta^{Y|1,0} + mu^Z mu^XZ / eta^{Y|1,1})
//                        / (1/eta^{Y|0,0} + mu^Z / eta^{Y|0,1}).
inline CausalParams causal_from_nocausal(const NoCausalParams& nc) {
  if (nc.has_three_way())
    throw InputError("causal conversion is defined only for models without the three-way term");
  CausalParams cp;
  cp.y = nc.mu(term::Y);
  cp.xy = nc.mu(term::XY);
  cp.zy = nc.mu(term::ZY);
  const auto eta_y = eta_factors(cp).y_given_xz;

  const double mu_z = nc.mu(term::Z);
  const double mu_xz = nc.mu(term::XZ);
  cp.z_c = mu_z * eta_y[0][0] / eta_y[0][1];
  cp.xz_c = mu_xz * eta_y[1][0] * eta_y[0][1] / (eta_y[0][0] * eta_y[1][1]);
  cp.x_c = nc.mu(term::X) * (1.0 / eta_y[1][0] + mu_z * mu_xz / eta_y[1][1]) /
           (1.0 / eta_y[0][0] + mu_z / eta_y[0][1]);
  cp.check();
  return cp;
}

// Inverse of causal_from_nocausal. The intercept is chosen so the implied
// joint distribution sums to one.
inline NoCausalParams nocausal_from_causal(const CausalParams& cp) {
  if (cp.with_interaction || cp.xzy != 1.0)
    throw InputError("no-causal conversion is defined only for models without the three-way term");
  cp.check();
  const auto eta_y = eta_factors(cp).y_given_xz;

  const double mu_z = cp.z_c * eta_y[0][1] / eta_y[0][0];
  const double mu_xz = cp.xz_c * eta_y[0][0] * eta_y[1][1] / (eta_y[1][0] * eta_y[0][1]);
  const double mu_x = cp.x_c * (1.0 / eta_y[0][0] + mu_z / eta_y[0][1]) /
                      (1.0 / eta_y[1][0] + mu_z * mu_xz / eta_y[1][1]);

  std::array<double, kTerms> lambda{};
  lambda[term_position(term::X)] = std::log(mu_x);
  lambda[term_position(term::Z)] = std::log(mu_z);
  lambda[term_position(term::Y)] = std::log(cp.y);
  lambda[term_position(term::XZ)] = std::log(mu_xz);
  lambda[term_position(term::XY)] = std::log(cp.xy);
  lambda[term_position(term::ZY)] = std::log(cp.zy);
  double total = 0.0;
  for (double m : expected_counts(NoCausalParams(lambda))) total += m;
  lambda[term_position(term::eta)] = -std::log(total);
  return NoCausalParams(lambda);
}

}  // namespace cloglin
