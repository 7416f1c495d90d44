#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "diracsea/grid.hpp"
#include "diracsea/units.hpp"

using namespace diracsea;

namespace {
std::vector<cplx> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> f(n);
  for (auto& v : f) v = cplx(g(rng), g(rng));
  return f;
}
}  // namespace

TEST_CASE("make_grid: Fourier duality for the (8, -pi, pi) box") {
  const GridPair g = make_grid(8, -std::numbers::pi, std::numbers::pi);
  CHECK(g.dx == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-15));
  CHECK(g.dp == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> sorted = g.modes;
  std::sort(sorted.begin(), sorted.end());
  for (int j = -4; j < 4; ++j) {
    CHECK(sorted[static_cast<std::size_t>(j + 4)] == doctest::Approx(j).epsilon(1e-14));
  }
  CHECK(g.dx * g.dp * static_cast<double>(g.n_points) ==
        doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("make_grid: dp = 2 pi / box for (1024, -2, 2)") {
  const GridPair g = make_grid(1024, -2.0, 2.0);
  CHECK(g.dp == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
}

TEST_CASE("make_grid: rejects bad input") {
  CHECK_THROWS_AS(make_grid(100, -1.0, 1.0), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(make_grid(4, -1.0, 1.0), std::invalid_argument);    // too small
  CHECK_THROWS_AS(make_grid(64, 1.0, 1.0), std::invalid_argument);    // degenerate box
}

TEST_CASE("a Fig.-2-sized box contains the light cone at t_p") {
  // x_edge + c t_p with t_p = 3e-3 requires x_max >= x_edge + 0.412
  const double lambda = units::compton_wavelength;
  const double x_edge = -35.0 * lambda + 16.0 * lambda * std::numbers::pi / 2.0;
  const double reach = x_edge + units::light_speed * 3.0e-3;
  CHECK(reach == doctest::Approx(x_edge + 0.41111).epsilon(1e-4));
  const GridPair g = make_grid(2048, -0.85, 0.50);
  CHECK(g.x_max > reach);
}

TEST_CASE("spectral transform: plane wave maps to a single mode") {
  const GridPair g = make_grid(64, -1.5, 2.5);
  SpectralTransform tr(g);
  const std::size_t target = 5;
  std::vector<cplx> f(g.n_points), ft(g.n_points);
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double phase = g.modes[target] * g.x(j);
    f[j] = cplx(std::cos(phase), std::sin(phase));
  }
  tr.to_momentum(f, ft);
  for (std::size_t k = 0; k < g.n_points; ++k) {
    if (k == target) continue;
    CHECK(std::abs(ft[k]) < 1e-12 * std::abs(ft[target]));
  }
  // |f|^2 integrates to the box length; Parseval carries it to the mode side.
  double norm_x = 0.0;
  for (const auto& v : f) norm_x += std::norm(v);
  norm_x *= g.dx;
  CHECK(std::abs(ft[target]) * std::abs(ft[target]) * g.dp ==
        doctest::Approx(norm_x).epsilon(1e-12));
}

TEST_CASE("spectral transform: roundtrip identity and Parseval on random fields") {
  const GridPair g = make_grid(256, -3.0, 1.0);
  SpectralTransform tr(g);
  const auto f = random_field(g.n_points, 42);
  std::vector<cplx> ft(g.n_points), back(g.n_points);
  tr.to_momentum(f, ft);
  tr.to_position(ft, back);
  double max_err = 0.0, norm_x = 0.0, norm_p = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    max_err = std::max(max_err, std::abs(back[j] - f[j]));
    norm_x += std::norm(f[j]);
    norm_p += std::norm(ft[j]);
  }
  CHECK(max_err <= 1e-12);
  CHECK(norm_x * g.dx == doctest::Approx(norm_p * g.dp).epsilon(1e-12));
}

TEST_CASE("spectral transform: length mismatch is rejected") {
  const GridPair g = make_grid(32, 0.0, 1.0);
  SpectralTransform tr(g);
  std::vector<cplx> bad(16), out(32);
  CHECK_THROWS_AS(tr.to_momentum(bad, out), std::invalid_argument);
}

TEST_CASE("conjugate_index pairs +p with -p and fixes the Nyquist mode") {
  const GridPair g = make_grid(16, -1.0, 1.0);
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const std::size_t kc = g.conjugate_index(k);
    if (k == g.n_points / 2) {
      CHECK(kc == k);
    } else {
      CHECK(g.modes[kc] == doctest::Approx(-g.modes[k]).epsilon(1e-14));
    }
  }
}
