#pragma once

#include <optional>
#include <span>
#include <vector>

#include "diracsea/dirac_basis.hpp"
#include "diracsea/grid.hpp"
#include "diracsea/propagator.hpp"

namespace diracsea {

// Synthesis of sample-space fields from orthonormal mode coefficients; lets the
// density assembly run on the spectral grid and on dense toy bases alike.
class ModeSynthesis {
 public:
  virtual ~ModeSynthesis() = default;
  virtual std::size_t n_modes() const = 0;
  virtual std::size_t n_samples() const = 0;
  virtual double sample_weight() const = 0;  // integration weight per sample
  virtual void synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                          std::span<cplx> up, std::span<cplx> lo) const = 0;
};

class GridSynthesis final : public ModeSynthesis {
 public:
  explicit GridSynthesis(const ModeBasis& basis)
      : basis_(&basis), tr_(basis.grid()), field_(basis.grid().n_points) {}
  std::size_t n_modes() const override { return basis_->n_modes(); }
  std::size_t n_samples() const override { return basis_->grid().n_points; }
  double sample_weight() const override { return basis_->grid().dx; }
  void synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                  std::span<cplx> up, std::span<cplx> lo) const override;

 private:
  const ModeBasis* basis_;
  mutable SpectralTransform tr_;
  mutable SpinorField field_;
};

// The second-quantized number density split per the Bogoliubov structure:
//   rho1 = rho_vac_e + |A+|^2 - |A-|^2      (electron sector)
//   rho2 = rho_vac_p + |B-|^2 - |B+|^2      (positron sector)
//   rho3 = 2 Re(A+^dag B-) - 2 Re(A-^dag B+)  (cross sector, integrates to 0)
// with the four auxiliary fields A± = P+ U(t) chi±, B± = P- U(t) chi± built
// from the propagator blocks (coefficients carry the source-mode index) and
//   rho_vac_e = sum_q |P+ U w_q|^2,  rho_vac_p = sum_q |P- U v_q|^2.
// rho_total = rho_vac + |A+ + B-|^2 - |A- + B+|^2 >= 0 pointwise;
// rho_wp = rho_total - rho_vac.
struct DensityDecomposition {
  double t = 0.0;
  std::vector<double> rho1, rho2, rho3, rho_vac, rho_wp, rho_total;
};

struct ParticleCount {
  double n_total = 0.0;
  double n_vac = 0.0;
  double electrons_from_pairs = 0.0;  // n_vac / 2
  // Pauli-blocking deficit kappa = |P- U chi+|^2 + |P+ U chi-|^2;
  // the exact identity is n_total = n_vac + 1 - 2*kappa.
  double blocking_deficit = 0.0;
};

// Wavepacket-independent parts, accumulated column by column (deterministic
// fixed-order reduction). Threads only used by the grid overload.
struct VacuumDensity {
  std::vector<double> electron, positron;  // per sample
};
VacuumDensity vacuum_density(const PropagatorMatrix& p, const ModeBasis& basis,
                             unsigned threads = 0);
VacuumDensity vacuum_density(const PropagatorMatrix& p, const ModeSynthesis& synth);

// The four evolved auxiliary fields as sample arrays.
struct AuxiliaryFields {
  std::vector<cplx> a_plus_up, a_plus_lo;    // P+ U chi+
  std::vector<cplx> a_minus_up, a_minus_lo;  // P+ U chi-
  std::vector<cplx> b_plus_up, b_plus_lo;    // P- U chi+
  std::vector<cplx> b_minus_up, b_minus_lo;  // P- U chi-
  double norm_b_plus = 0.0;                  // |P- U chi+|^2 (blocking, electron side)
  double norm_a_minus = 0.0;                 // |P+ U chi-|^2 (blocking, positron side)
};
AuxiliaryFields wavepacket_fields(const PropagatorMatrix& p, const WavepacketCoefficients& coeffs,
                                  const ModeSynthesis& synth);

DensityDecomposition combine_density(double t, const AuxiliaryFields& aux,
                                     const VacuumDensity& vac);

DensityDecomposition wavepacket_density(const PropagatorMatrix& p,
                                        const WavepacketCoefficients& coeffs,
                                        const ModeSynthesis& synth, const VacuumDensity& vac);

// Analytic free evolution (phase advance e^{-iEt} on h+, e^{+iEt} on h-).
WavepacketCoefficients free_evolve_coefficients(const WavepacketCoefficients& coeffs,
                                                const ModeBasis& basis, double t);

ParticleCount particle_count(const DensityDecomposition& d, double sample_weight,
                             const AuxiliaryFields* aux = nullptr);

// Conditional mean over [a, b] of the vacuum-subtracted density rho_wp.
// Returns nullopt (no-transmission signal) when the region mass is below 1e-12.
std::optional<double> conditional_mean_position(const DensityDecomposition& d,
                                                const GridPair& grid, double a, double b);
// Same restricted mean for an arbitrary density array.
std::optional<double> conditional_mean_position(std::span<const double> rho, const GridPair& grid,
                                                double a, double b);

}  // namespace diracsea
