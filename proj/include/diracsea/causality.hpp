#pragma once

#include <string>
#include <vector>

#include "diracsea/dirac_basis.hpp"
#include "diracsea/grid.hpp"

namespace diracsea {

// Light-cone front emanating from the right edge of the initial support.
struct LightCone {
  double x_edge = 0.0;
  double front(double t) const;
};

LightCone light_cone(const WavepacketSpec& spec);

// Positive reshaping f(x) of the initial packet on its support (identity
// outside); the reshaped packet is renormalized to unit norm.
struct InterventionProfile {
  std::string name;
  std::vector<double> f;  // per grid point; 1 outside the support

  void validate() const;  // f >= 0 everywhere
};

InterventionProfile identity_profile(const GridPair& grid);
// sqrt(2) * theta(x - x0): keeps the right half (x >= x0) only.
InterventionProfile right_half_profile(const WavepacketSpec& spec, const GridPair& grid);
// Gaussian bump exp(-(x-x0)^2 / (2 (D/2)^2)) on the support.
InterventionProfile gaussian_bump_profile(const WavepacketSpec& spec, const GridPair& grid);
InterventionProfile make_profile(const std::string& name, const WavepacketSpec& spec,
                                 const GridPair& grid);

SpinorField apply_intervention(const SpinorField& field, const InterventionProfile& profile,
                               double dx);

// One space-like probe: first grid point >= front(t) + margin_dx * dx.
struct ProbeSpec {
  double t = 0.0;
  double margin_dx = 0.0;
};

struct ProbePoint {
  double t = 0.0;
  double x = 0.0;
  std::size_t index = 0;
  double margin = 0.0;  // x - front(t) > 0
};

// Throws if the probe is not strictly beyond the front (test would be vacuous).
ProbePoint place_probe(const LightCone& cone, const GridPair& grid, const ProbeSpec& spec);

// Per-probe densities for each intervention plus the vacuum value.
struct ProbeRecord {
  ProbePoint point;
  std::vector<double> rho;  // one per intervention, ordered as the report lists them
  double rho_vac = 0.0;
  double max_pairwise = 0.0;  // max |rho_i - rho_j|
  double max_vs_vac = 0.0;    // max |rho_i - rho_vac|
};

struct CausalityReport {
  std::vector<std::string> interventions;
  std::vector<ProbeRecord> probes;
  double scale = 0.0;           // max_x rho_vac at the probed times (relative scale)
  double floor_rel = 0.0;       // measured free-field beyond-cone leakage (relative)
  double threshold_rel = 0.0;   // max(1e-6, 3 * floor_rel)
  double max_pairwise_rel = 0.0;
  double max_vs_vac_rel = 0.0;
  bool pass = false;

  void finalize();  // fills the relative maxima and the verdict
};

}  // namespace diracsea
