#include "diracsea/causality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diracsea/units.hpp"

namespace diracsea {

double LightCone::front(double t) const { return x_edge + units::light_speed * t; }

LightCone light_cone(const WavepacketSpec& spec) { return LightCone{spec.support_max()}; }

void InterventionProfile::validate() const {
  for (const double v : f) {
    if (!(v >= 0.0)) throw std::invalid_argument("InterventionProfile: f must be nonnegative");
  }
}

InterventionProfile identity_profile(const GridPair& grid) {
  return InterventionProfile{"identity", std::vector<double>(grid.n_points, 1.0)};
}

InterventionProfile right_half_profile(const WavepacketSpec& spec, const GridPair& grid) {
  InterventionProfile p{"right_half", std::vector<double>(grid.n_points, 1.0)};
  const double s = std::sqrt(2.0);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    if (x < spec.support_min() || x > spec.support_max()) continue;
    p.f[j] = x >= spec.x0 ? s : 0.0;  // theta(0) = 1
  }
  return p;
}

InterventionProfile gaussian_bump_profile(const WavepacketSpec& spec, const GridPair& grid) {
  InterventionProfile p{"gaussian_bump", std::vector<double>(grid.n_points, 1.0)};
  const double sigma = 0.5 * spec.width_d;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    if (x < spec.support_min() || x > spec.support_max()) continue;
    const double u = (x - spec.x0) / sigma;
    p.f[j] = std::exp(-0.5 * u * u);
  }
  return p;
}

InterventionProfile make_profile(const std::string& name, const WavepacketSpec& spec,
                                 const GridPair& grid) {
  if (name == "identity") return identity_profile(grid);
  if (name == "right_half") return right_half_profile(spec, grid);
  if (name == "gaussian_bump") return gaussian_bump_profile(spec, grid);
  throw std::invalid_argument("unknown intervention profile: " + name);
}

SpinorField apply_intervention(const SpinorField& field, const InterventionProfile& profile,
                               double dx) {
  profile.validate();
  if (field.size() != profile.f.size()) {
    throw std::invalid_argument("apply_intervention: size mismatch");
  }
  SpinorField out = field;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out.up[j] *= profile.f[j];
    out.lo[j] *= profile.f[j];
  }
  const double norm = out.norm_squared(dx);
  if (norm <= 0.0) throw std::invalid_argument("apply_intervention: profile removed the packet");
  out.scale(1.0 / std::sqrt(norm));
  return out;
}

ProbePoint place_probe(const LightCone& cone, const GridPair& grid, const ProbeSpec& spec) {
  const double front = cone.front(spec.t);
  const double target = front + spec.margin_dx * grid.dx;
  const std::size_t idx = grid.index_at_or_above(target);
  ProbePoint p{spec.t, grid.x(idx), idx, grid.x(idx) - front};
  if (p.margin <= 0.0) {
    throw std::invalid_argument("place_probe: probe inside the light cone (test would be vacuous)");
  }
  if (p.x >= grid.x_max - grid.dx) {
    throw std::invalid_argument("place_probe: probe outside the box");
  }
  return p;
}

void CausalityReport::finalize() {
  max_pairwise_rel = 0.0;
  max_vs_vac_rel = 0.0;
  for (auto& rec : probes) {
    rec.max_pairwise = 0.0;
    rec.max_vs_vac = 0.0;
    for (std::size_t i = 0; i < rec.rho.size(); ++i) {
      rec.max_vs_vac = std::max(rec.max_vs_vac, std::abs(rec.rho[i] - rec.rho_vac));
      for (std::size_t j = i + 1; j < rec.rho.size(); ++j) {
        rec.max_pairwise = std::max(rec.max_pairwise, std::abs(rec.rho[i] - rec.rho[j]));
      }
    }
    if (scale > 0.0) {
      max_pairwise_rel = std::max(max_pairwise_rel, rec.max_pairwise / scale);
      max_vs_vac_rel = std::max(max_vs_vac_rel, rec.max_vs_vac / scale);
    }
  }
  threshold_rel = std::max(1e-6, 3.0 * floor_rel);
  pass = max_pairwise_rel <= threshold_rel && max_vs_vac_rel <= threshold_rel;
}

}  // namespace diracsea
