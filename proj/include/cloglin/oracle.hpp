#pragma once

// Probability-space evaluation of every effect straight from the eight joint
// cells. No parameters and no normalization factors are involved; each
// definition is transcribed literally from its conditional-probability form.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cloglin/errors.hpp"
#include "cloglin/report.hpp"
#include "cloglin/table.hpp"

namespace cloglin {

struct OracleReport : EffectsReport {
  // P(Y=1|X=x) as sum_z P(Y=1|x,z) P(z|x) and from the XY margin.
  std::array<double, 2> y1_given_x_mixture{};
  std::array<double, 2> y1_given_x_margin{};
};

namespace oracle_detail {

inline double odds(double p, const std::string& what) {
  if (!(p > 0.0) || !(p < 1.0)) throw DegenerateProbability(what + " is 0 or 1");
  return p / (1.0 - p);
}

}  // namespace oracle_detail

inline OracleReport oracle_effects(const JointProbabilityTable& joint, Direction d = {}) {
  d.check();
  using oracle_detail::odds;

  std::array<double, 2> px{};                          // P(X=x)
  std::array<std::array<double, 2>, 2> pxz{};          // P(X=x, Z=z)
  std::array<std::array<double, 2>, 2> pz{};           // P(Z=z | X=x)
  std::array<std::array<double, 2>, 2> py{};           // P(Y=1 | X=x, Z=z)
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      pxz[x][z] = joint.prob(x, z, 0) + joint.prob(x, z, 1);
      px[x] += pxz[x][z];
    }
  for (int x = 0; x < 2; ++x) {
    if (!(px[x] > 0.0)) throw DegenerateProbability("P(X=" + std::to_string(x) + ") is 0");
    for (int z = 0; z < 2; ++z) {
      if (!(pxz[x][z] > 0.0))
        throw DegenerateProbability("P(X=" + std::to_string(x) + ",Z=" + std::to_string(z) + ") is 0");
      pz[x][z] = pxz[x][z] / px[x];
      py[x][z] = joint.prob(x, z, 1) / pxz[x][z];
    }
  }

  // sum_z P(Y=1 | X=a, Z=z) P(Z=z | X=b)
  auto mix = [&](int a, int b) { return py[a][0] * pz[b][0] + py[a][1] * pz[b][1]; };
  auto mix_name = [](int a, int b) {
    return "sum_z P(Y=1|X=" + std::to_string(a) + ",Z=z) P(Z=z|X=" + std::to_string(b) + ")";
  };
  auto cond_name = [](int x, int z) {
    return "P(Y=1|X=" + std::to_string(x) + ",Z=" + std::to_string(z) + ")";
  };

  const int x0 = d.from;
  const int x1 = d.to;

  OracleReport r;
  r.direction = d;
  const double base = odds(mix(x0, x0), mix_name(x0, x0));
  r.te = odds(mix(x1, x1), mix_name(x1, x1)) / base;
  r.nde = odds(mix(x1, x0), mix_name(x1, x0)) / base;
  r.ie = odds(mix(x0, x1), mix_name(x0, x1)) / base;
  r.ie_reverse = odds(mix(x1, x0), mix_name(x1, x0)) / odds(mix(x1, x1), mix_name(x1, x1));
  for (int z = 0; z < 2; ++z) {
    r.lde[z] = odds(py[x1][z], cond_name(x1, z)) / odds(py[x0][z], cond_name(x0, z));
    r.cell[z] = (odds(mix(x1, x0), mix_name(x1, x0)) / base) / r.lde[z];
  }
  r.additive_interaction = py[1][1] - py[0][1] - py[1][0] + py[0][0];
  r.multiplicative_interaction = (odds(py[1][1], cond_name(1, 1)) * odds(py[0][0], cond_name(0, 0))) /
                                 (odds(py[0][1], cond_name(0, 1)) * odds(py[1][0], cond_name(1, 0)));
  for (int z = 0; z < 2; ++z)
    r.decomposition_residual =
        std::max(r.decomposition_residual, std::abs(r.te - r.lde[z] * r.cell[z] / r.ie_reverse));

  for (int x = 0; x < 2; ++x) {
    r.y1_given_x_mixture[x] = mix(x, x);
    r.y1_given_x_margin[x] = (joint.prob(x, 0, 1) + joint.prob(x, 1, 1)) / px[x];
  }
  return r;
}

}  // namespace cloglin
