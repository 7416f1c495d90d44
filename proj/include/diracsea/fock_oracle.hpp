#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

#include "diracsea/fock_density.hpp"
#include "diracsea/propagator.hpp"

namespace diracsea {

// Brute-force second-quantized reference on <= 4 momentum modes: the full
// 2^(2n)-dimensional fermionic Fock space with dense Jordan-Wigner operator
// matrices. Test support; everything is exact up to roundoff.
struct ToyModel {
  int n_modes = 0;
  Eigen::MatrixXcd h_sp;   // 2n x 2n Hermitian single-particle Hamiltonian, basis [v..., w...]
  Eigen::MatrixXcd modes;  // (2*n_samples) x 2n orthonormal columns; rows: up-samples then lo-samples
  Eigen::VectorXcd g;      // 2n initial coefficients [g+..., g-...], unit norm

  int n_samples() const { return static_cast<int>(modes.rows()) / 2; }
  void validate() const;  // n_modes <= 4 (cost guard), Hermiticity, orthonormal modes
};

// Free diagonal (+E, -E) plus a random coupling block; random orthonormal mode
// functions over n_samples = n_modes positions; random unit-norm coefficients.
ToyModel random_toy_model(int n_modes, std::uint64_t seed);

// Max deviation of the dense {b_p, b_k^+} = delta_pk (and d-analogue) and of all
// mixed anticommutators from the standard algebra.
double anticommutator_defect(int n_modes);

// Max deviation of the Heisenberg-evolved annihilation/creation matrices from
// the single-particle Bogoliubov relations (the relations used in production).
double bogoliubov_defect(const ToyModel& model, double t);

struct ToyDensity {
  Eigen::VectorXd rho_total, rho_vac, rho1, rho2, rho3;
  double n_total = 0.0, n_vac = 0.0, blocking_deficit = 0.0;
};

// Operator-level density: Jordan-Wigner matrices Heisenberg-evolved through the
// exact Fock propagator; vacuum parts and the four auxiliary fields evaluated
// as Fock matrix elements; combined per the production decomposition.
ToyDensity exact_density(const ToyModel& model, double t);

// The production assembly (propagator blocks from the dense single-particle
// exponential + shared density code) on the same model, for equality tests.
ToyDensity decomposition_density(const ToyModel& model, double t);

struct CausalityIdentityResult {
  double zzz_value = 0.0;           // <chi| O |chi>, = 1 for norm-preserving f
  double algebraic_residual = 0.0;  // |<chi| sum f Phi^+ O' Phi |chi> - <0|O'|0> * zzz|
  double raw_defect = 0.0;          // |<chi| O' O |chi> - <0|O'|0> * zzz| (not constrained in a toy)
};

// Evaluates the intervention identity in the toy Fock space; the algebraic
// steps that do not require space-like separation must close to roundoff.
CausalityIdentityResult exact_causality_identity(const ToyModel& model,
                                                 std::span<const double> f_samples,
                                                 int probe_sample, double t);

// Dense synthesis over toy mode functions (sample weight 1).
class DenseSynthesis final : public ModeSynthesis {
 public:
  explicit DenseSynthesis(const Eigen::MatrixXcd& modes);
  std::size_t n_modes() const override { return static_cast<std::size_t>(modes_.cols()) / 2; }
  std::size_t n_samples() const override { return static_cast<std::size_t>(modes_.rows()) / 2; }
  double sample_weight() const override { return 1.0; }
  void synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                  std::span<cplx> up, std::span<cplx> lo) const override;

 private:
  Eigen::MatrixXcd modes_;
};

// Propagator blocks from the dense single-particle exponential exp(-i h t).
PropagatorMatrix toy_propagator(const ToyModel& model, double t);

}  // namespace diracsea
