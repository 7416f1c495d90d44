#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diracsea/fock_density.hpp"
#include "diracsea/units.hpp"

using namespace diracsea;

namespace {

constexpr double kLambda = units::compton_wavelength;

struct MiniRun {
  GridPair grid;
  ModeBasis basis;
  SpectralTransform tr;
  WavepacketSpec packet;
  BarrierSpec barrier;
  double dt;

  MiniRun(std::size_t n, double a, double b, WavepacketSpec p, BarrierSpec bar, double step)
      : grid(make_grid(n, a, b)), basis(grid), tr(grid), packet(p), barrier(bar), dt(step) {}

  PropagatorMatrix matrix(std::size_t n_steps, unsigned threads = 2) const {
    const SplitStepper st = SplitStepper::make(basis, potential_table(barrier, grid), dt);
    PropagatorBuild build(basis, st, threads);
    build.advance(n_steps);
    return build.project();
  }
};

MiniRun smoke_run() {
  return MiniRun(256, -0.15, 0.15, {-0.06, 200.0, 3.0 * kLambda},
                 {1.77 * units::rest_energy, 1.5 * kLambda, 0.35 * kLambda}, 1.25e-6);
}

}  // namespace

TEST_CASE("t = 0: decomposition equals the initial packet density exactly") {
  MiniRun r = smoke_run();
  const SpinorField packet = initial_wavepacket(r.packet, r.grid);
  const WavepacketCoefficients c = project_coefficients(packet, r.basis, r.tr);
  const PropagatorMatrix id = PropagatorMatrix::identity(r.grid.n_points);
  GridSynthesis synth(r.basis);
  const VacuumDensity vac = vacuum_density(id, r.basis, 2);
  const DensityDecomposition d = wavepacket_density(id, c, synth, vac);
  const std::vector<double> expect = packet.density();
  double err = 0.0, vacmax = 0.0;
  for (std::size_t j = 0; j < r.grid.n_points; ++j) {
    err = std::max(err, std::abs(d.rho_total[j] - expect[j]));
    vacmax = std::max(vacmax, d.rho_vac[j]);
  }
  CHECK(err <= 1e-10);
  CHECK(vacmax == 0.0);
  // rho_wp at t = 0 equals the packet density pointwise
  for (std::size_t j = 0; j < r.grid.n_points; j += 17) {
    CHECK(std::abs(d.rho_wp[j] - expect[j]) <= 1e-10);
  }
}

TEST_CASE("free evolution: matrix-path density matches the analytic free density") {
  MiniRun r(256, -0.30, 0.12, {-0.08, 150.0, 3.0 * kLambda}, {}, 1.5e-6);
  const SpinorField packet = initial_wavepacket(r.packet, r.grid);
  const WavepacketCoefficients c0 = project_coefficients(packet, r.basis, r.tr);
  const std::size_t n_steps = 160;
  const PropagatorMatrix pm = r.matrix(n_steps);
  GridSynthesis synth(r.basis);
  const VacuumDensity vac = vacuum_density(pm, r.basis, 2);
  const DensityDecomposition d = wavepacket_density(pm, c0, synth, vac);

  // analytic oracle: phase advance e^{-iEt} on h+, e^{+iEt} on h-
  const WavepacketCoefficients ct = free_evolve_coefficients(c0, r.basis, pm.t);
  SpinorField wave;
  r.basis.synthesize(ct.h_plus, ct.h_minus, r.tr, wave);
  const std::vector<double> expect = wave.density();

  double err = 0.0, vacmax = 0.0;
  for (std::size_t j = 0; j < r.grid.n_points; ++j) {
    err = std::max(err, std::abs(d.rho_total[j] - expect[j]));
    vacmax = std::max(vacmax, d.rho_vac[j]);
  }
  CHECK(err <= 1e-8);
  CHECK(vacmax <= 1e-12);
  const ParticleCount count = particle_count(d, r.grid.dx);
  CHECK(std::abs(count.n_total - 1.0) <= 1e-10);
  CHECK(std::abs(count.n_vac) <= 1e-12);
}

TEST_CASE("vacuum run: zero coefficients reproduce rho_vac identically") {
  MiniRun r = smoke_run();
  const PropagatorMatrix pm = r.matrix(100);
  GridSynthesis synth(r.basis);
  const VacuumDensity vac = vacuum_density(pm, r.basis, 2);
  WavepacketCoefficients zero;
  zero.h_plus.assign(r.grid.n_points, cplx{});
  zero.h_minus.assign(r.grid.n_points, cplx{});
  const DensityDecomposition d = wavepacket_density(pm, zero, synth, vac);
  for (std::size_t j = 0; j < r.grid.n_points; j += 13) {
    CHECK(d.rho_total[j] == d.rho_vac[j]);
    CHECK(d.rho_wp[j] == 0.0);
  }
}

TEST_CASE("barrier run: number bookkeeping, rho3 integral, positivity") {
  MiniRun r = smoke_run();
  const SpinorField packet = initial_wavepacket(r.packet, r.grid);
  const WavepacketCoefficients c0 = project_coefficients(packet, r.basis, r.tr);
  for (const std::size_t steps : {60u, 180u}) {
    const PropagatorMatrix pm = r.matrix(steps);
    GridSynthesis synth(r.basis);
    const VacuumDensity vac = vacuum_density(pm, r.basis, 2);
    const AuxiliaryFields aux = wavepacket_fields(pm, c0, synth);
    const DensityDecomposition d = combine_density(pm.t, aux, vac);
    const ParticleCount count = particle_count(d, r.grid.dx, &aux);

    CHECK(count.n_vac > 0.0);  // the quench creates pairs
    // exact identity N_total = N_vac + 1 - 2 kappa
    CHECK(std::abs(count.n_total - count.n_vac - 1.0 + 2.0 * count.blocking_deficit) <= 1e-11);

    double rho3_sum = 0.0, rho_min = 0.0, rho1_min = 0.0;
    for (std::size_t j = 0; j < r.grid.n_points; ++j) {
      rho3_sum += d.rho3[j];
      rho_min = std::min(rho_min, d.rho_total[j]);
      rho1_min = std::min(rho1_min, d.rho1[j]);
    }
    CHECK(std::abs(rho3_sum * r.grid.dx) <= 1e-8);
    CHECK(rho_min >= -1e-10);   // positivity
    CHECK(rho1_min >= -1e-10);  // Pauli-blocking term never wins
  }
}

TEST_CASE("short-time vacuum density grows as O(t^2)") {
  // quadratic regime needs t well below both 1/E_max and 1/(2 m c^2)
  MiniRun r(256, -0.15, 0.15, {-0.06, 200.0, 3.0 * kLambda},
            {1.77 * units::rest_energy, 1.5 * kLambda, 0.35 * kLambda}, 1.25e-7);
  auto nvac_at = [&](std::size_t steps) {
    const PropagatorMatrix pm = r.matrix(steps);
    const VacuumDensity vac = vacuum_density(pm, r.basis, 2);
    double s = 0.0;
    for (std::size_t j = 0; j < r.grid.n_points; ++j) s += vac.electron[j] + vac.positron[j];
    return s * r.grid.dx;
  };
  const double n1 = nvac_at(2), n2 = nvac_at(4);
  CHECK(n2 / n1 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Strang splitting: observable error falls as O(dt^2)") {
  // Richardson on N_vac at fixed t for dt, dt/2, dt/4.
  auto nvac = [&](double dt, std::size_t steps) {
    MiniRun r(256, -0.15, 0.15, {-0.06, 200.0, 3.0 * kLambda},
              {1.77 * units::rest_energy, 1.5 * kLambda, 0.35 * kLambda}, dt);
    const PropagatorMatrix pm = r.matrix(steps);
    const VacuumDensity vac = vacuum_density(pm, r.basis, 2);
    double s = 0.0;
    for (std::size_t j = 0; j < r.grid.n_points; ++j) s += vac.electron[j] + vac.positron[j];
    return s * r.grid.dx;
  };
  const double base_dt = 1.25e-6;
  const double a = nvac(base_dt, 96);
  const double b = nvac(base_dt / 2.0, 192);
  const double c = nvac(base_dt / 4.0, 384);
  const double ratio = (a - b) / (b - c);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("conditional mean: symmetric packet and the no-transmission signal") {
  const GridPair g = make_grid(256, -0.2, 0.2);
  std::vector<double> rho(g.n_points, 0.0);
  const double xc = 0.05;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double d = g.x(j) - xc;
    if (std::abs(d) < 0.03) rho[j] = 0.03 * 0.03 - d * d;  // even bump about xc
  }
  const auto mean = conditional_mean_position(rho, g, -0.1, 0.19);
  REQUIRE(mean.has_value());
  CHECK(*mean == doctest::Approx(xc).epsilon(1e-6));
  // empty region
  CHECK_FALSE(conditional_mean_position(rho, g, 0.15, 0.19).has_value());
}

TEST_CASE("conditional mean of a freely drifting packet follows the transport velocity") {
  MiniRun r(512, -0.35, 0.15, {-0.1, 150.0, 3.0 * kLambda}, {}, 1.2e-6);
  const SpinorField packet = initial_wavepacket(r.packet, r.grid);
  const WavepacketCoefficients c0 = project_coefficients(packet, r.basis, r.tr);
  // density transport velocity: +v for h+, -v for h- content
  double v_eff = 0.0;
  for (std::size_t k = 0; k < r.basis.n_modes(); ++k) {
    const double gv =
        units::light_speed * units::light_speed * r.grid.modes[k] / r.basis.energy(k);
    v_eff += gv * (std::norm(c0.h_plus[k]) - std::norm(c0.h_minus[k]));
  }
  const double t = 4.0e-4;
  const WavepacketCoefficients ct = free_evolve_coefficients(c0, r.basis, t);
  SpinorField wave;
  r.basis.synthesize(ct.h_plus, ct.h_minus, r.tr, wave);
  const auto mean = conditional_mean_position(wave.density(), r.grid, r.grid.x_min, r.grid.x_max);
  REQUIRE(mean.has_value());
  const double expect = r.packet.x0 + v_eff * t;
  CHECK(std::abs(*mean - expect) <= 0.01 * std::abs(expect - r.packet.x0) + 1e-4);
}
