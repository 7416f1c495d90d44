#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diracsea/fock_oracle.hpp"

using namespace diracsea;

TEST_CASE("dense anticommutators follow the standard fermionic algebra") {
  CHECK(anticommutator_defect(2) <= 1e-14);
  CHECK(anticommutator_defect(3) <= 1e-14);
}

TEST_CASE("cost guard: more than 4 modes is rejected") {
  ToyModel m = random_toy_model(3, 1);
  m.n_modes = 5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  CHECK_THROWS_AS(exact_density(m, 0.1), std::invalid_argument);
}

TEST_CASE("Heisenberg evolution realizes the Bogoliubov relations") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const ToyModel m = random_toy_model(3, seed);
    CHECK(bogoliubov_defect(m, 0.37) <= 1e-12);
  }
  CHECK(bogoliubov_defect(random_toy_model(2, 9), 1.1) <= 1e-12);
}

TEST_CASE("identity evolution: a pure v_k packet has density |v_k(x)|^2") {
  ToyModel m = random_toy_model(3, 4);
  m.g.setZero();
  m.g(1) = 1.0;  // pure v_1
  const ToyDensity d = exact_density(m, 0.0);
  for (int s = 0; s < m.n_samples(); ++s) {
    const double expect =
        std::norm(m.modes(s, 1)) + std::norm(m.modes(m.n_samples() + s, 1));
    CHECK(d.rho_total(s) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(d.rho_vac(s)) <= 1e-13);
  }
}

TEST_CASE("t = 0: density equals the initial packet density for any model") {
  const ToyModel m = random_toy_model(3, 5);
  const ToyDensity d = exact_density(m, 0.0);
  const Eigen::VectorXcd field = m.modes * m.g;
  for (int s = 0; s < m.n_samples(); ++s) {
    const double expect = std::norm(field(s)) + std::norm(field(m.n_samples() + s));
    CHECK(d.rho_total(s) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("decomposition equals the operator-level oracle on random models") {
  double max_err = 0.0, max_number = 0.0;
  for (unsigned seed = 0; seed < 25; ++seed) {
    const ToyModel m = random_toy_model(3, 100 + seed);
    const double t = 0.1 + 0.05 * static_cast<double>(seed);
    const ToyDensity exact = exact_density(m, t);
    const ToyDensity decomp = decomposition_density(m, t);
    max_err = std::max(max_err, (exact.rho_total - decomp.rho_total).cwiseAbs().maxCoeff());
    max_err = std::max(max_err, (exact.rho_vac - decomp.rho_vac).cwiseAbs().maxCoeff());
    max_err = std::max(max_err, (exact.rho1 - decomp.rho1).cwiseAbs().maxCoeff());
    max_err = std::max(max_err, (exact.rho2 - decomp.rho2).cwiseAbs().maxCoeff());
    max_err = std::max(max_err, (exact.rho3 - decomp.rho3).cwiseAbs().maxCoeff());
    // number bookkeeping: N_total = N_vac + 1 - 2 kappa at machine precision
    max_number = std::max(
        max_number, std::abs(exact.n_total - exact.n_vac - 1.0 + 2.0 * exact.blocking_deficit));
    max_number = std::max(max_number, std::abs(exact.blocking_deficit - decomp.blocking_deficit));
    // positivity survives the subtractions
    CHECK(exact.rho_total.minCoeff() >= -1e-10);
    CHECK(exact.rho1.minCoeff() >= -1e-10);
    CHECK(exact.rho2.minCoeff() >= -1e-10);
    // the cross term integrates to zero
    CHECK(std::abs(exact.rho3.sum()) <= 1e-10);
  }
  CHECK(max_err <= 1e-10);
  CHECK(max_number <= 1e-12);
}

TEST_CASE("decomposition equals the oracle on 2- and 4-mode models too") {
  for (const int n : {2, 4}) {
    const ToyModel m = random_toy_model(n, 777 + static_cast<unsigned>(n));
    const ToyDensity exact = exact_density(m, 0.6);
    const ToyDensity decomp = decomposition_density(m, 0.6);
    CHECK((exact.rho_total - decomp.rho_total).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("vacuum run: zero coefficients leave exactly the vacuum density") {
  ToyModel m = random_toy_model(3, 8);
  // coefficient normalization is required by validate(); bypass by scaling after
  ToyModel vac_model = m;
  vac_model.g.setZero();
  vac_model.g(0) = 1.0;
  const ToyDensity with_packet = exact_density(vac_model, 0.5);
  // rho_vac never depends on g: compare against another g
  const ToyDensity other = exact_density(m, 0.5);
  CHECK((with_packet.rho_vac - other.rho_vac).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("causality identity: zzz value and algebraic residual") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (unsigned seed : {11u, 12u, 13u}) {
    const ToyModel m = random_toy_model(3, seed);
    const int ns = m.n_samples();

    // f == 1: <chi|O|chi> = 1 exactly
    std::vector<double> ones(static_cast<std::size_t>(ns), 1.0);
    const CausalityIdentityResult unit = exact_causality_identity(m, ones, 0, 0.45);
    CHECK(std::abs(unit.zzz_value - 1.0) <= 1e-12);
    CHECK(unit.algebraic_residual <= 1e-12);

    // random nonnegative f, rescaled to conserve the norm
    std::vector<double> f(static_cast<std::size_t>(ns));
    for (auto& v : f) v = 0.2 + uni(rng);
    const Eigen::VectorXcd field = m.modes * m.g;
    double mass = 0.0;
    for (int s = 0; s < ns; ++s) {
      mass += f[static_cast<std::size_t>(s)] *
              (std::norm(field(s)) + std::norm(field(ns + s)));
    }
    for (auto& v : f) v /= mass;
    const CausalityIdentityResult r = exact_causality_identity(m, f, ns - 1, 0.45);
    CHECK(std::abs(r.zzz_value - 1.0) <= 1e-12);
    CHECK(r.algebraic_residual <= 1e-12);

    // trivial evolution with the packet amplitude vanishing at the probe:
    // both sides equal the vacuum expectation even without reordering
    ToyModel quiet = m;
    const int probe = ns - 1;
    Eigen::VectorXcd row_up = quiet.modes.row(probe).adjoint();
    Eigen::VectorXcd row_lo = quiet.modes.row(ns + probe).adjoint();
    Eigen::VectorXcd g = quiet.g;
    g -= row_up * (row_up.dot(g) / row_up.squaredNorm());
    row_lo -= row_up * (row_up.dot(row_lo) / row_up.squaredNorm());
    g -= row_lo * (row_lo.dot(g) / row_lo.squaredNorm());
    quiet.g = g.normalized();
    const CausalityIdentityResult triv = exact_causality_identity(quiet, ones, probe, 0.0);
    CHECK(triv.raw_defect <= 1e-12);
  }
}

TEST_CASE("negative f is rejected") {
  const ToyModel m = random_toy_model(2, 21);
  std::vector<double> f(static_cast<std::size_t>(m.n_samples()), 1.0);
  f[0] = -0.5;
  CHECK_THROWS_AS(exact_causality_identity(m, f, 0, 0.3), std::invalid_argument);
}
