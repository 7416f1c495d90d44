#include "diracsea/barrier.hpp"

#include <cmath>
#include <stdexcept>

#include "diracsea/units.hpp"

namespace diracsea {

void BarrierSpec::validate(double dx) const {
  if (is_free()) return;
  if (length <= 0.0) throw std::invalid_argument("BarrierSpec: L must be positive");
  if (eps <= 0.0) throw std::invalid_argument("BarrierSpec: eps must be positive");
  if (eps < 2.0 * dx) throw std::invalid_argument("BarrierSpec: eps < 2*dx, not resolvable on grid");
}

double potential(double x, const BarrierSpec& spec) {
  if (spec.is_free()) return 0.0;
  return 0.5 * spec.v0 *
         (std::tanh((x + 0.5 * spec.length) / spec.eps) -
          std::tanh((x - 0.5 * spec.length) / spec.eps));
}

std::vector<double> potential_table(const BarrierSpec& spec, const GridPair& grid) {
  std::vector<double> v(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) v[j] = potential(grid.x(j), spec);
  return v;
}

bool is_supercritical(const BarrierSpec& spec) { return spec.v0 > 2.0 * units::rest_energy; }

bool is_klein_regime(const BarrierSpec& spec, double mean_energy) {
  const double d = mean_energy - spec.v0;
  return d * d > units::rest_energy * units::rest_energy;
}

}  // namespace diracsea
