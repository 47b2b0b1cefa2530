#pragma once

// Odds-ratio causal effects of X on Y mediated by Z, evaluated from causal
// parameters through the normalization factors.
//
// With p(x,z) = P(Y=1|X=x,Z=z) and q(z|x) = P(Z=z|X=x), a change of X from
// x to x' gives
//   TE      = OR[ sum_z p(x,z) q(z|x)   ->  sum_z p(x',z) q(z|x') ]
//   LDE(z)  = OR[ p(x,z)                ->  p(x',z) ]
//   NDE     = OR[ sum_z p(x,z) q(z|x)   ->  sum_z p(x',z) q(z|x) ]
//   IE      = OR[ sum_z p(x,z) q(z|x)   ->  sum_z p(x,z) q(z|x') ]
//   Cell(z) = NDE / LDE(z)
// and TE = LDE(z) Cell(z) / IE_{x',x}.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cloglin/causal.hpp"
#include "cloglin/errors.hpp"
#include "cloglin/report.hpp"

namespace cloglin {

namespace detail {

// Odds of sum_z p(a,z) q(z|b). Both the probability and its complement are
// formed from the normalization factors, 1 - p(a,z) = eta^{Y|a,z}.
inline double mixture_odds(const CausalParams& cp, const NormalizationFactors& f, int a, int b) {
  double num = 0.0;
  double den = 0.0;
  for (int z = 0; z < 2; ++z) {
    const double q = f.z_given_x[b] * (z == 1 ? cp.z_weight(b) : 1.0);
    num += f.y_given_xz[a][z] * cp.y_weight(a, z) * q;
    den += f.y_given_xz[a][z] * q;
  }
  const double odds = num / den;
  if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(odds) || odds == 0.0)
    throw DegenerateProbability("sum_z P(Y=1|X=" + std::to_string(a) + ",Z=z) P(Z=z|X=" + std::to_string(b) +
                                ") is 0 or 1");
  return odds;
}

inline double cell_odds(const CausalParams& cp, int x, int z) {
  const double w = cp.y_weight(x, z);
  if (!(w > 0.0) || !std::isfinite(w))
    throw DegenerateProbability("P(Y=1|X=" + std::to_string(x) + ",Z=" + std::to_string(z) + ") is 0 or 1");
  return w;
}

inline void check_level(int z) {
  if (z != 0 && z != 1) throw InputError("mediator level must be 0 or 1");
}

}  // namespace detail

inline double total_effect(const CausalParams& cp, Direction d = {}) {
  d.check();
  const auto f = eta_factors(cp);
  return detail::mixture_odds(cp, f, d.to, d.to) / detail::mixture_odds(cp, f, d.from, d.from);
}

inline double lde(const CausalParams& cp, Direction d, int z) {
  d.check();
  detail::check_level(z);
  return detail::cell_odds(cp, d.to, z) / detail::cell_odds(cp, d.from, z);
}

inline double natural_direct_effect(const CausalParams& cp, Direction d = {}) {
  d.check();
  const auto f = eta_factors(cp);
  return detail::mixture_odds(cp, f, d.to, d.from) / detail::mixture_odds(cp, f, d.from, d.from);
}

inline double cell_effect(const CausalParams& cp, Direction d, int z) {
  return natural_direct_effect(cp, d) / lde(cp, d, z);
}

inline double indirect_effect(const CausalParams& cp, Direction d = {}) {
  d.check();
  const auto f = eta_factors(cp);
  return detail::mixture_odds(cp, f, d.from, d.to) / detail::mixture_odds(cp, f, d.from, d.from);
}

inline double additive_interaction(const CausalParams& cp) {
  const auto f = eta_factors(cp);
  auto p = [&](int x, int z) { return f.y_given_xz[x][z] * cp.y_weight(x, z); };
  return p(1, 1) - p(0, 1) - p(1, 0) + p(0, 0);
}

// Conditional cross odds ratio of Y over the four (X,Z) cells.
inline double multiplicative_interaction_or(const CausalParams& cp) {
  return detail::cell_odds(cp, 1, 1) * detail::cell_odds(cp, 0, 0) /
         (detail::cell_odds(cp, 0, 1) * detail::cell_odds(cp, 1, 0));
}

inline EffectsReport effects_report(const CausalParams& cp, Direction d = {}) {
  cp.check();
  d.check();
  EffectsReport r;
  r.direction = d;
  r.te = total_effect(cp, d);
  r.nde = natural_direct_effect(cp, d);
  r.ie = indirect_effect(cp, d);
  r.ie_reverse = indirect_effect(cp, d.reversed());
  for (int z = 0; z < 2; ++z) {
    r.lde[z] = lde(cp, d, z);
    r.cell[z] = cell_effect(cp, d, z);
  }
  r.additive_interaction = additive_interaction(cp);
  r.multiplicative_interaction = multiplicative_interaction_or(cp);
  for (int z = 0; z < 2; ++z)
    r.decomposition_residual =
        std::max(r.decomposition_residual, std::abs(r.te - r.lde[z] * r.cell[z] / r.ie_reverse));
  return r;
}

// Parameter-level closed forms for the change X: 0 -> 1 under the dummy code.
namespace forward {

inline double lde(const CausalParams& cp, int z) { return z == 1 ? cp.xy * cp.xzy : cp.xy; }

// mu^{XY} [A / B] [C / D]^{-1} with A = eta00 + mu_c^Z eta01,
// B = eta10 + mu_c^Z mu_c^XZ eta11, C = eta00 + mu_c^Z mu^ZY eta01,
// D = eta10 + mu_c^Z mu_c^XZ mu^ZY mu^XZY eta11.
inline double total_effect(const CausalParams& cp) {
  const auto e = eta_factors(cp).y_given_xz;
  const double a = e[0][0] + cp.z_c * e[0][1];
  const double b = e[1][0] + cp.z_c * cp.xz_c * e[1][1];
  const double c = e[0][0] + cp.z_c * cp.zy * e[0][1];
  const double d = e[1][0] + cp.z_c * cp.xz_c * cp.zy * cp.xzy * e[1][1];
  return cp.xy * (a / b) / (c / d);
}

// Reduces to the z-free form when mu^{XZY} = 1.
inline double cell_effect(const CausalParams& cp, int z) {
  const auto e = eta_factors(cp).y_given_xz;
  const double lead = z == 1 ? 1.0 / cp.xzy : 1.0;
  return lead * (e[0][0] + e[0][1] * cp.z_c) / (e[0][0] + e[0][1] * cp.z_c * cp.zy) *
         (e[1][0] + e[1][1] * cp.xzy * cp.z_c * cp.zy) / (e[1][0] + e[1][1] * cp.z_c);
}

}  // namespace forward

}  // namespace cloglin
