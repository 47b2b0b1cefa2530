#pragma once

// Published parameter sets for the two example datasets and the worked
// conversion example.

#include "cloglin/causal.hpp"
#include "cloglin/loglin_fit.hpp"

namespace cloglin::testkit {

// First dataset: model without the three-way term.
inline CausalParams first_dataset() {
  CausalParams cp;
  cp.xy = 1.9240;
  cp.zy = 2.4038;
  cp.y = 0.4881;
  cp.xz_c = 3.3059;
  cp.z_c = 0.4659;
  cp.x_c = 1.7132;
  return cp;
}

// Second dataset: model with the three-way term.
inline CausalParams second_dataset() {
  CausalParams cp;
  cp.xzy = 2.8826;
  cp.xy = 1.4042;
  cp.zy = 3.5385;
  cp.y = 0.2826;
  cp.xz_c = 3.5534;
  cp.z_c = 0.3390;
  cp.x_c = 1.2278;
  cp.with_interaction = true;
  return cp;
}

// No-causal parameters of the conversion example, mu^{X=1,Z=1} supplied.
inline NoCausalParams conversion_example(double mu_xz) {
  return additive_from_multiplicative({1.0, 1.5, 2.0, 0.2, mu_xz, 0.02, 0.01, 1.0});
}

}  // namespace cloglin::testkit
