#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "diracsea/grid.hpp"

namespace diracsea {

enum class ModeKind { particle, antiparticle };

// One free-Dirac eigenmode. `spinor` is the unit two-component amplitude
// (real under the phase convention: first nonzero component positive).
struct FreeMode {
  double p = 0.0;
  double energy = 0.0;  // +sqrt(p^2 c^2 + m^2 c^4); the antiparticle mode has H0-eigenvalue -energy
  ModeKind kind = ModeKind::particle;
  std::array<double, 2> spinor{1.0, 0.0};
};

// Plane-wave eigenbasis of the free Dirac Hamiltonian H0 = c*sigma1*p + sigma3*m*c^2
// on a GridPair. For each spatial wavevector m the two unit spinors are
//   u+(m) ~ (1,  c*m/(m c^2 + E_m))   with H0(m) u+ = +E_m u+
//   u-(m) ~ (1, -c*m/(m c^2 - E_m))   with H0(m) u- = -E_m u-,  u-(0) = (0, 1)
// The textbook antiparticle label p corresponds to spatial wavevector -p
// (w_p(x) ~ u-(-p) e^{-ipx}); internally everything is indexed by wavevector,
// which keeps the 2n-mode basis exactly orthonormal, including at Nyquist.
//
// Grid normalization: mode fields satisfy <v_p|v_k> = delta_pk / dp (the
// Kronecker realization of delta(p-k)); orthonormal coefficients h relate to
// the continuum expansion functions by g(p) = h / sqrt(dp).
class ModeBasis {
 public:
  explicit ModeBasis(const GridPair& grid);

  const GridPair& grid() const { return *grid_; }
  std::size_t n_modes() const { return grid_->n_points; }
  double energy(std::size_t k) const { return energy_[k]; }
  const std::array<double, 2>& u_plus(std::size_t k) const { return u_plus_[k]; }
  const std::array<double, 2>& u_minus(std::size_t k) const { return u_minus_[k]; }

  // Spec-facing view by momentum label; p must be a grid mode.
  FreeMode free_mode(double p, ModeKind kind) const;
  // Field samples of the labeled mode, <v_p|v_k> = delta/dp normalization.
  SpinorField mode_field(double p, ModeKind kind) const;

  // Orthonormal-coefficient projections/synthesis (h-convention).
  void project(const SpinorField& f, SpectralTransform& tr,
               std::span<cplx> h_plus, std::span<cplx> h_minus) const;
  void synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                  SpectralTransform& tr, SpinorField& out) const;

 private:
  const GridPair* grid_;
  std::vector<double> energy_;
  std::vector<std::array<double, 2>> u_plus_, u_minus_;
  std::size_t index_of_momentum(double p) const;
};

// Initial packet G(x) = (cos^8((x-x0)/D) e^{i p0 x}, 0) on the compact support
// [x0 - D*pi/2, x0 + D*pi/2], exactly zero outside, normalized to unit norm.
struct WavepacketSpec {
  double x0 = 0.0;
  double p0 = 0.0;
  double width_d = 0.0;  // D

  double support_min() const;
  double support_max() const;
  void validate(const GridPair& grid) const;  // support inside the box
};

SpinorField initial_wavepacket(const WavepacketSpec& spec, const GridPair& grid);

// Expansion coefficients of a field over the free basis, orthonormal convention:
// h_plus[k] = <v-mode at wavevector modes[k] | field>, likewise h_minus.
// sum(|h+|^2 + |h-|^2) = 1 for a unit-norm field.
struct WavepacketCoefficients {
  std::vector<cplx> h_plus, h_minus;

  double norm_squared() const;
};

WavepacketCoefficients project_coefficients(const SpinorField& field, const ModeBasis& basis,
                                            SpectralTransform& tr);

// Group-velocity expectation: c^2 p / E_p over |g+(p)|^2 and -c^2 p / E_p over
// |g-(p)|^2 (equivalently +c^2 m / E_m for every wavevector-m coefficient).
// Units of a.u.; divide by c for units of c. Throws on zero-norm input.
double mean_velocity(const WavepacketCoefficients& coeffs, const ModeBasis& basis);

}  // namespace diracsea
