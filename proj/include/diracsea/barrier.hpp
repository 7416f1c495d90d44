#pragma once

#include <vector>

#include "diracsea/grid.hpp"

namespace diracsea {

// Smoothed rectangular electrostatic barrier
//   V(x) = (V0/2) [tanh((x + L/2)/eps) - tanh((x - L/2)/eps)].
struct BarrierSpec {
  double v0 = 0.0;      // height [a.u.]; 0 means free evolution
  double length = 0.0;  // L
  double eps = 0.0;     // smoothness

  void validate(double dx) const;  // L > 0, eps >= 2*dx
  bool is_free() const { return v0 == 0.0; }
};

double potential(double x, const BarrierSpec& spec);
std::vector<double> potential_table(const BarrierSpec& spec, const GridPair& grid);

// V0 above the pair-production threshold 2 m c^2.
bool is_supercritical(const BarrierSpec& spec);
// Klein regime for a packet of mean energy E: (E - V0)^2 > m^2 c^4.
bool is_klein_regime(const BarrierSpec& spec, double mean_energy);

}  // namespace diracsea
