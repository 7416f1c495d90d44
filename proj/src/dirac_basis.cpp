#include "diracsea/dirac_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "diracsea/units.hpp"

namespace diracsea {

namespace {
constexpr double kC = units::light_speed;
constexpr double kMc2 = units::rest_energy;
}  // namespace

ModeBasis::ModeBasis(const GridPair& grid) : grid_(&grid) {
  const std::size_t n = grid.n_points;
  energy_.resize(n);
  u_plus_.resize(n);
  u_minus_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = grid.modes[k];
    const double e = kC * std::hypot(m, kC);
    energy_[k] = e;
    const double np = std::sqrt((e + kMc2) / (2.0 * e));  // makes u+ a unit vector
    u_plus_[k] = {np, np * kC * m / (kMc2 + e)};
    if (m == 0.0) {
      u_minus_[k] = {0.0, 1.0};  // analytic limit of the normalized ratio
    } else {
      const double nm = std::sqrt((e - kMc2) / (2.0 * e));
      u_minus_[k] = {nm, nm * kC * m / (kMc2 - e)};
    }
  }
}

std::size_t ModeBasis::index_of_momentum(double p) const {
  const double j = p / grid_->dp;
  const auto ji = static_cast<std::ptrdiff_t>(std::llround(j));
  if (std::abs(j - static_cast<double>(ji)) > 1e-9) {
    throw std::invalid_argument("ModeBasis: p is not a grid mode");
  }
  const auto half = static_cast<std::ptrdiff_t>(grid_->n_points / 2);
  if (ji < -half || ji >= half) {
    throw std::invalid_argument("ModeBasis: p outside the momentum lattice");
  }
  return ji >= 0 ? static_cast<std::size_t>(ji)
                 : grid_->n_points - static_cast<std::size_t>(-ji);
}

FreeMode ModeBasis::free_mode(double p, ModeKind kind) const {
  const std::size_t k = index_of_momentum(p);
  FreeMode mode;
  mode.p = p;
  mode.energy = energy_[k];
  mode.kind = kind;
  if (kind == ModeKind::particle) {
    mode.spinor = u_plus_[k];
  } else {
    // w_p carries spatial wavevector -p; its spinor is u- evaluated there.
    mode.spinor = u_minus_[grid_->conjugate_index(k)];
  }
  return mode;
}

SpinorField ModeBasis::mode_field(double p, ModeKind kind) const {
  const std::size_t n = grid_->n_points;
  const std::size_t k = index_of_momentum(p);
  const std::size_t kw = kind == ModeKind::particle ? k : grid_->conjugate_index(k);
  const auto& u = kind == ModeKind::particle ? u_plus_[kw] : u_minus_[kw];
  const double wavevector = grid_->modes[kw];
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  SpinorField f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = wavevector * grid_->x(j);
    const cplx wave = amp * cplx(std::cos(phase), std::sin(phase));
    f.up[j] = u[0] * wave;
    f.lo[j] = u[1] * wave;
  }
  return f;
}

void ModeBasis::project(const SpinorField& f, SpectralTransform& tr,
                        std::span<cplx> h_plus, std::span<cplx> h_minus) const {
  const std::size_t n = grid_->n_points;
  std::vector<cplx> fu(n), fl(n);
  tr.to_momentum(f.up, fu);
  tr.to_momentum(f.lo, fl);
  const double s = std::sqrt(grid_->dp);
  for (std::size_t k = 0; k < n; ++k) {
    h_plus[k] = s * (u_plus_[k][0] * fu[k] + u_plus_[k][1] * fl[k]);
    h_minus[k] = s * (u_minus_[k][0] * fu[k] + u_minus_[k][1] * fl[k]);
  }
}

void ModeBasis::synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                           SpectralTransform& tr, SpinorField& out) const {
  const std::size_t n = grid_->n_points;
  std::vector<cplx> fu(n), fl(n);
  const double s = 1.0 / std::sqrt(grid_->dp);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx hp = h_plus.empty() ? cplx{} : h_plus[k];
    const cplx hm = h_minus.empty() ? cplx{} : h_minus[k];
    fu[k] = s * (u_plus_[k][0] * hp + u_minus_[k][0] * hm);
    fl[k] = s * (u_plus_[k][1] * hp + u_minus_[k][1] * hm);
  }
  if (out.size() != n) out = SpinorField(n);
  tr.to_position(fu, out.up);
  tr.to_position(fl, out.lo);
}

double WavepacketSpec::support_min() const { return x0 - width_d * std::numbers::pi / 2.0; }
double WavepacketSpec::support_max() const { return x0 + width_d * std::numbers::pi / 2.0; }

void WavepacketSpec::validate(const GridPair& grid) const {
  if (width_d <= 0.0) throw std::invalid_argument("WavepacketSpec: D must be positive");
  if (support_min() <= grid.x_min || support_max() >= grid.x_max) {
    throw std::invalid_argument("WavepacketSpec: support exceeds the box");
  }
}

SpinorField initial_wavepacket(const WavepacketSpec& spec, const GridPair& grid) {
  spec.validate(grid);
  SpinorField f(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    if (x <= spec.support_min() || x >= spec.support_max()) continue;  // exact zeros outside D
    const double u = (x - spec.x0) / spec.width_d;
    const double c = std::cos(u);
    const double env = std::pow(c, 8);
    const double phase = spec.p0 * x;
    f.up[j] = env * cplx(std::cos(phase), std::sin(phase));
  }
  const double norm = f.norm_squared(grid.dx);
  if (norm <= 0.0) throw std::invalid_argument("initial_wavepacket: empty support on this grid");
  f.scale(1.0 / std::sqrt(norm));
  return f;
}

double WavepacketCoefficients::norm_squared() const {
  double s = 0.0;
  for (const auto& h : h_plus) s += std::norm(h);
  for (const auto& h : h_minus) s += std::norm(h);
  return s;
}

WavepacketCoefficients project_coefficients(const SpinorField& field, const ModeBasis& basis,
                                            SpectralTransform& tr) {
  WavepacketCoefficients c;
  c.h_plus.resize(basis.n_modes());
  c.h_minus.resize(basis.n_modes());
  basis.project(field, tr, c.h_plus, c.h_minus);
  return c;
}

double mean_velocity(const WavepacketCoefficients& coeffs, const ModeBasis& basis) {
  const double norm = coeffs.norm_squared();
  if (norm < 1e-14) throw std::invalid_argument("mean_velocity: zero-norm coefficients");
  double v = 0.0;
  for (std::size_t k = 0; k < basis.n_modes(); ++k) {
    const double gv = kC * kC * basis.grid().modes[k] / basis.energy(k);
    v += gv * (std::norm(coeffs.h_plus[k]) + std::norm(coeffs.h_minus[k]));
  }
  return v / norm;
}

}  // namespace diracsea
