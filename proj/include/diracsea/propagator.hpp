#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "diracsea/barrier.hpp"
#include "diracsea/dirac_basis.hpp"
#include "diracsea/grid.hpp"

namespace diracsea {

// Symmetric (Strang) split-operator stepper for H = H0 + V(x):
// one step applies exp(-i K dt/2) exp(-i V dt) exp(-i K dt/2) with the kinetic
// factor exact per mode, exp(-i H0(m) dt) = cos(E dt) I - i sin(E dt)/E * H0(m).
struct SplitStepper {
  const GridPair* grid = nullptr;
  const ModeBasis* basis = nullptr;
  double dt = 0.0;
  std::vector<std::array<cplx, 4>> kin_full, kin_half;  // 2x2 row-major per mode
  std::vector<cplx> pot_phase;                          // exp(-i V(x_j) dt)
  std::vector<cplx> pot_phase_over_n;                   // same / n_points (raw-FFT loop)

  static SplitStepper make(const ModeBasis& basis, std::span<const double> potential, double dt);
};

// One symmetric split step; exactly norm-preserving up to transform roundoff.
void step(SpinorField& field, const SplitStepper& st, SpectralTransform& tr);

struct EvolveReport {
  // max over steps of (edge-window density / global max density); the window is
  // the outermost 4 points on each side. Sampled in the position representation
  // once per step.
  double edge_density_max = 0.0;
};

// n_steps steps with adjacent half-kinetic factors fused (algebraically the
// same composition as repeated step()).
EvolveReport evolve_field(SpinorField& field, const SplitStepper& st, std::size_t n_steps,
                          bool monitor_edges = true);

// Single-particle evolution amplitudes between free-basis modes at time t.
// Blocks are n x n, column-major (entry [row + n*col]); rows and columns are
// orthonormal modes indexed by spatial wavevector in FFT order (see ModeBasis).
// Continuum matrix elements <v_p|U|v_k> correspond to block/dp.
struct PropagatorMatrix {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<cplx> vv, vw, wv, ww;

  PropagatorMatrix() = default;
  explicit PropagatorMatrix(std::size_t n_modes, double time = 0.0);
  static PropagatorMatrix identity(std::size_t n_modes);

  cplx block_at(int row_branch, int col_branch, std::size_t r, std::size_t c) const;
};

// Analytic free-field matrix: vv = diag(e^{-i E t}), ww = diag(e^{+i E t}).
PropagatorMatrix free_propagator_matrix(const ModeBasis& basis, double t);

// Evolves all 2n basis columns through the stepper; supports incremental
// advancing with matrix snapshots. Column evolutions are independent, so the
// result is identical for any thread count.
class PropagatorBuild {
 public:
  PropagatorBuild(const ModeBasis& basis, const SplitStepper& stepper, unsigned threads);

  void advance(std::size_t n_steps);
  std::size_t current_step() const { return steps_done_; }
  double current_time() const { return static_cast<double>(steps_done_) * stepper_->dt; }
  PropagatorMatrix project() const;

 private:
  const ModeBasis* basis_;
  const SplitStepper* stepper_;
  unsigned threads_;
  std::size_t steps_done_ = 0;
  std::vector<cplx> col_up_, col_lo_;  // 2n columns, each n samples
};

// Max-norm deviation of the assembled 2n x 2n matrix times its conjugate
// transpose from the identity.
double unitarity_defect(const PropagatorMatrix& m, unsigned threads = 0);

// Binary checkpoint. Layout (little-endian throughout): magic "DSPM", u32
// version = 1, u64 n_modes, f64 t, then the four blocks in order vv, vw, wv,
// ww, each row-major as (re, im) pairs of 64-bit floats.
void save_checkpoint(const std::string& path, const PropagatorMatrix& m);
PropagatorMatrix load_checkpoint(const std::string& path);

}  // namespace diracsea
