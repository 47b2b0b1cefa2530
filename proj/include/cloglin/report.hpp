#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "cloglin/errors.hpp"

namespace cloglin {

struct Direction {
  int from = 0;
  int to = 1;

  void check() const {
    if ((from != 0 && from != 1) || (to != 0 && to != 1) || from == to)
      throw InputError("direction levels must be distinct values in {0,1}");
  }
  Direction reversed() const { return Direction{to, from}; }
  friend bool operator==(Direction, Direction) = default;
};

struct EffectsReport {
  Direction direction;
  double te = 1.0;
  std::array<double, 2> lde{1.0, 1.0};   // indexed by z
  std::array<double, 2> cell{1.0, 1.0};  // indexed by z
  double ie = 1.0;
  double ie_reverse = 1.0;  // IE for the opposite change of X
  double nde = 1.0;
  double additive_interaction = 0.0;
  double multiplicative_interaction = 1.0;
  double decomposition_residual = 0.0;
};

// Largest field-wise difference between two reports, relative to the field
// magnitude with a floor of 1 (the additive interaction can sit at 0).
inline double max_discrepancy(const EffectsReport& a, const EffectsReport& b) {
  double worst = 0.0;
  auto cmp = [&](double u, double v) {
    worst = std::max(worst, std::abs(u - v) / std::max({1.0, std::abs(u), std::abs(v)}));
  };
  cmp(a.te, b.te);
  cmp(a.ie, b.ie);
  cmp(a.ie_reverse, b.ie_reverse);
  cmp(a.nde, b.nde);
  for (int z = 0; z < 2; ++z) {
    cmp(a.lde[z], b.lde[z]);
    cmp(a.cell[z], b.cell[z]);
  }
  cmp(a.additive_interaction, b.additive_interaction);
  cmp(a.multiplicative_interaction, b.multiplicative_interaction);
  return worst;
}

}  // namespace cloglin
