#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "diracsea/dirac_basis.hpp"
#include "diracsea/units.hpp"

using namespace diracsea;

namespace {

constexpr double kC = units::light_speed;
constexpr double kMc2 = units::rest_energy;

GridPair test_grid() { return make_grid(256, -0.4, 0.35); }

SpinorField random_spinor_field(const GridPair& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gs(0.0, 1.0);
  SpinorField f(g.n_points);
  for (std::size_t j = 0; j < g.n_points; ++j) {
    f.up[j] = cplx(gs(rng), gs(rng));
    f.lo[j] = cplx(gs(rng), gs(rng));
  }
  f.scale(1.0 / std::sqrt(f.norm_squared(g.dx)));
  return f;
}

}  // namespace

TEST_CASE("free_mode: p = 0") {
  const GridPair g = test_grid();
  const ModeBasis basis(g);
  const FreeMode vp = basis.free_mode(0.0, ModeKind::particle);
  CHECK(vp.spinor[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vp.spinor[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(vp.energy == doctest::Approx(kMc2).epsilon(1e-15));
  const FreeMode wp = basis.free_mode(0.0, ModeKind::antiparticle);
  CHECK(wp.spinor[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wp.spinor[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("free_mode: normalization factor at p = 200") {
  // Unit spinor norm via 1 + c^2 p^2/(mc^2+E)^2 = 2E/(E+mc^2).
  const GridPair g = make_grid(512, -std::numbers::pi / 10.0, std::numbers::pi / 10.0);  // dp = 10
  const ModeBasis basis(g);
  const FreeMode m = basis.free_mode(200.0, ModeKind::particle);
  const double e = kC * std::sqrt(200.0 * 200.0 + kC * kC);
  CHECK(m.energy == doctest::Approx(e).epsilon(1e-14));
  CHECK(m.spinor[0] == doctest::Approx(std::sqrt((e + kMc2) / (2.0 * e))).epsilon(1e-14));
  CHECK(m.spinor[0] * m.spinor[0] + m.spinor[1] * m.spinor[1] ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.energy >= kMc2);
}

TEST_CASE("mode fields: Kronecker delta / dp normalization and kind orthogonality") {
  const GridPair g = test_grid();
  const ModeBasis basis(g);
  const double p = 4.0 * g.dp;
  const SpinorField v = basis.mode_field(p, ModeKind::particle);
  const SpinorField w = basis.mode_field(p, ModeKind::antiparticle);
  CHECK(v.norm_squared(g.dx) == doctest::Approx(1.0 / g.dp).epsilon(1e-12));
  cplx vw{}, vk{};
  const SpinorField v2 = basis.mode_field(p + g.dp, ModeKind::particle);
  for (std::size_t j = 0; j < g.n_points; ++j) {
    vw += (std::conj(v.up[j]) * w.up[j] + std::conj(v.lo[j]) * w.lo[j]) * g.dx;
    vk += (std::conj(v.up[j]) * v2.up[j] + std::conj(v.lo[j]) * v2.lo[j]) * g.dx;
  }
  CHECK(std::abs(vw) <= 1e-10 / g.dp);  // <v_p|w_p> = 0
  CHECK(std::abs(vk) <= 1e-10 / g.dp);  // distinct momenta
}

TEST_CASE("orthonormality of the full mode family (h-convention)") {
  const GridPair g = make_grid(64, -0.2, 0.2);
  const ModeBasis basis(g);
  SpectralTransform tr(g);
  std::vector<cplx> hp(g.n_points), hm(g.n_points);
  const double s = std::sqrt(g.dp);
  for (std::size_t k = 0; k < g.n_points; k += 7) {
    for (const ModeKind kind : {ModeKind::particle, ModeKind::antiparticle}) {
      SpinorField f = basis.mode_field(g.modes[k], kind);
      f.scale(s);  // orthonormal normalization
      basis.project(f, tr, hp, hm);
      const std::size_t expect = kind == ModeKind::particle ? k : g.conjugate_index(k);
      for (std::size_t q = 0; q < g.n_points; ++q) {
        const double want_plus = (kind == ModeKind::particle && q == expect) ? 1.0 : 0.0;
        const double want_minus = (kind == ModeKind::antiparticle && q == expect) ? 1.0 : 0.0;
        CHECK(std::abs(hp[q] - want_plus) <= 1e-10);
        CHECK(std::abs(hm[q] - want_minus) <= 1e-10);
      }
    }
  }
}

TEST_CASE("basis completeness: project then reconstruct random fields") {
  const GridPair g = test_grid();
  const ModeBasis basis(g);
  SpectralTransform tr(g);
  for (unsigned seed : {1u, 2u, 3u}) {
    const SpinorField f = random_spinor_field(g, seed);
    std::vector<cplx> hp(g.n_points), hm(g.n_points);
    basis.project(f, tr, hp, hm);
    SpinorField back;
    basis.synthesize(hp, hm, tr, back);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
      err = std::max(err, std::abs(back.up[j] - f.up[j]));
      err = std::max(err, std::abs(back.lo[j] - f.lo[j]));
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("initial wavepacket: support, phase and normalization") {
  const double lambda = units::compton_wavelength;
  const GridPair g = make_grid(2048, -2.0, 0.3);
  const WavepacketSpec spec{-120.0 * lambda, 100.0, 70.0 * lambda};  // Fig.-1 packet
  const SpinorField f = initial_wavepacket(spec, g);

  CHECK(f.norm_squared(g.dx) == doctest::Approx(1.0).epsilon(1e-13));
  // exactly zero outside [x0 - 35 pi lambda, x0 + 35 pi lambda]
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double x = g.x(j);
    if (x < spec.support_min() - 1e-12 || x > spec.support_max() + 1e-12) {
      CHECK(std::norm(f.up[j]) + std::norm(f.lo[j]) == 0.0);
    }
    CHECK(f.lo[j] == cplx{});
  }
  // amplitude maximum at x0 with phase e^{i p0 x}
  const std::size_t j0 = g.index_at_or_above(spec.x0);
  double peak = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) peak = std::max(peak, std::abs(f.up[j]));
  CHECK(std::abs(f.up[j0]) == doctest::Approx(peak).epsilon(1e-3));
  const double expect_phase = spec.p0 * g.x(j0);
  CHECK(std::arg(f.up[j0] * std::polar(1.0, -expect_phase)) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("initial wavepacket: support exceeding the box is rejected") {
  const GridPair g = make_grid(128, -0.5, 0.5);
  CHECK_THROWS_AS(initial_wavepacket({0.0, 50.0, 0.5}, g), std::invalid_argument);
}

TEST_CASE("projection: pure mode gives a Kronecker coefficient") {
  const GridPair g = test_grid();
  const ModeBasis basis(g);
  SpectralTransform tr(g);
  const double p = 6.0 * g.dp;
  SpinorField f = basis.mode_field(p, ModeKind::particle);
  f.scale(std::sqrt(g.dp));  // orthonormal normalization
  const WavepacketCoefficients c = project_coefficients(f, basis, tr);
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const double expect = k == 6 ? 1.0 : 0.0;
    CHECK(std::abs(c.h_plus[k] - expect) <= 1e-11);
    CHECK(std::abs(c.h_minus[k]) <= 1e-11);
  }
}

TEST_CASE("compact support forces negative-energy content; coefficients are unit norm") {
  const GridPair g = make_grid(1024, -0.5, 0.3);
  const ModeBasis basis(g);
  SpectralTransform tr(g);
  const WavepacketSpec spec{-0.25, 200.0, 16.0 * units::compton_wavelength};
  const SpinorField f = initial_wavepacket(spec, g);
  const WavepacketCoefficients c = project_coefficients(f, basis, tr);
  CHECK(c.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  double minus_mass = 0.0;
  for (const auto& h : c.h_minus) minus_mass += std::norm(h);
  CHECK(minus_mass > 0.01);  // genuinely mixed, not a numerical residue
  // reconstruction closes to 1e-10
  SpinorField back;
  basis.synthesize(c.h_plus, c.h_minus, tr, back);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    err = std::max(err, std::abs(back.up[j] - f.up[j]));
    err = std::max(err, std::abs(back.lo[j] - f.lo[j]));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("mean velocity: pure p = 0 mode, narrow packet, and the light-speed bound") {
  const GridPair g = make_grid(1024, -0.5, 0.3);
  const ModeBasis basis(g);
  SpectralTransform tr(g);

  WavepacketCoefficients zero;
  zero.h_plus.assign(g.n_points, cplx{});
  zero.h_minus.assign(g.n_points, cplx{});
  zero.h_plus[0] = 1.0;  // p = 0
  CHECK(mean_velocity(zero, basis) == doctest::Approx(0.0).epsilon(1e-15));

  const WavepacketSpec spec{-0.25, 200.0, 16.0 * units::compton_wavelength};
  const SpinorField f = initial_wavepacket(spec, g);
  const WavepacketCoefficients c = project_coefficients(f, basis, tr);
  const double v = mean_velocity(c, basis) / kC;
  CHECK(v == doctest::Approx(0.825).epsilon(0.01));  // ~ c^2 p0 / E(p0) = 0.825 c

  // p0 -> infinity approaches c from below
  WavepacketCoefficients fast;
  fast.h_plus.assign(g.n_points, cplx{});
  fast.h_minus.assign(g.n_points, cplx{});
  fast.h_plus[g.n_points / 2 - 1] = 1.0;  // largest positive mode
  const double vf = mean_velocity(fast, basis) / kC;
  CHECK(vf < 1.0);
  CHECK(vf > 0.99);

  WavepacketCoefficients empty;
  empty.h_plus.assign(g.n_points, cplx{});
  empty.h_minus.assign(g.n_points, cplx{});
  CHECK_THROWS_AS(mean_velocity(empty, basis), std::invalid_argument);
}
