#include "diracsea/fock_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diracsea/parallel.hpp"

namespace diracsea {

void GridSynthesis::synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                               std::span<cplx> up, std::span<cplx> lo) const {
  basis_->synthesize(h_plus, h_minus, tr_, field_);
  std::copy(field_.up.begin(), field_.up.end(), up.begin());
  std::copy(field_.lo.begin(), field_.lo.end(), lo.begin());
}

namespace {

// y = block * x, blocks column-major n x n.
void block_matvec(std::span<const cplx> block, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = x.size();
  std::fill(y.begin(), y.end(), cplx{});
  for (std::size_t c = 0; c < n; ++c) {
    const cplx xc = x[c];
    if (xc == cplx{}) continue;
    const cplx* col = block.data() + c * n;
    for (std::size_t r = 0; r < n; ++r) y[r] += col[r] * xc;
  }
}

void accumulate_abs2(std::span<const cplx> up, std::span<const cplx> lo,
                     std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += std::norm(up[j]) + std::norm(lo[j]);
}

}  // namespace

VacuumDensity vacuum_density(const PropagatorMatrix& p, const ModeSynthesis& synth) {
  const std::size_t n = p.n;
  const std::size_t ns = synth.n_samples();
  VacuumDensity vac;
  vac.electron.assign(ns, 0.0);
  vac.positron.assign(ns, 0.0);
  std::vector<cplx> up(ns), lo(ns), col(n);
  for (std::size_t q = 0; q < n; ++q) {  // w-columns projected onto the + subspace
    std::copy_n(p.vw.data() + q * n, n, col.begin());
    synth.synthesize(col, {}, up, lo);
    accumulate_abs2(up, lo, vac.electron);
  }
  for (std::size_t q = 0; q < n; ++q) {  // v-columns projected onto the - subspace
    std::copy_n(p.wv.data() + q * n, n, col.begin());
    synth.synthesize({}, col, up, lo);
    accumulate_abs2(up, lo, vac.positron);
  }
  return vac;
}

VacuumDensity vacuum_density(const PropagatorMatrix& p, const ModeBasis& basis, unsigned threads) {
  const std::size_t n = p.n;
  const GridPair& grid = basis.grid();
  const std::size_t ns = grid.n_points;
  // Fixed block partition with an ordered reduction: results are identical for
  // every thread count.
  const unsigned nt = resolve_threads(threads);
  const std::size_t nblocks = std::min<std::size_t>(2 * n, 64);
  std::vector<std::vector<double>> part_e(nblocks), part_p(nblocks);
  parallel_for_blocks(nblocks, nt, [&](std::size_t blo, std::size_t bhi) {
    SpectralTransform tr(grid);
    SpinorField f(ns);
    std::vector<cplx> col(n);
    for (std::size_t b = blo; b < bhi; ++b) {
      part_e[b].assign(ns, 0.0);
      part_p[b].assign(ns, 0.0);
      const std::size_t lo = 2 * n * b / nblocks;
      const std::size_t hi = 2 * n * (b + 1) / nblocks;
      for (std::size_t c = lo; c < hi; ++c) {
        const bool electron = c < n;  // P+ of evolved w-columns
        const std::size_t q = c % n;
        std::copy_n((electron ? p.vw.data() : p.wv.data()) + q * n, n, col.begin());
        if (electron) {
          basis.synthesize(col, {}, tr, f);
        } else {
          basis.synthesize({}, col, tr, f);
        }
        auto& acc = electron ? part_e[b] : part_p[b];
        for (std::size_t j = 0; j < ns; ++j) acc[j] += std::norm(f.up[j]) + std::norm(f.lo[j]);
      }
    }
  });
  VacuumDensity vac;
  vac.electron.assign(ns, 0.0);
  vac.positron.assign(ns, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    for (std::size_t j = 0; j < ns; ++j) {
      vac.electron[j] += part_e[b][j];
      vac.positron[j] += part_p[b][j];
    }
  }
  return vac;
}

AuxiliaryFields wavepacket_fields(const PropagatorMatrix& p, const WavepacketCoefficients& coeffs,
                                  const ModeSynthesis& synth) {
  const std::size_t n = p.n;
  if (coeffs.h_plus.size() != n || coeffs.h_minus.size() != n) {
    throw std::invalid_argument("wavepacket_fields: coefficient size mismatch");
  }
  const std::size_t ns = synth.n_samples();
  AuxiliaryFields aux;
  std::vector<cplx> hp(n), hm(n);

  auto synth_plus = [&](std::span<const cplx> h, std::vector<cplx>& u, std::vector<cplx>& l) {
    u.resize(ns);
    l.resize(ns);
    synth.synthesize(h, {}, u, l);
  };
  auto synth_minus = [&](std::span<const cplx> h, std::vector<cplx>& u, std::vector<cplx>& l) {
    u.resize(ns);
    l.resize(ns);
    synth.synthesize({}, h, u, l);
  };

  block_matvec(p.vv, coeffs.h_plus, hp);   // A+ coefficients
  synth_plus(hp, aux.a_plus_up, aux.a_plus_lo);
  block_matvec(p.wv, coeffs.h_plus, hm);   // B+ coefficients
  for (const auto& h : hm) aux.norm_b_plus += std::norm(h);
  synth_minus(hm, aux.b_plus_up, aux.b_plus_lo);

  block_matvec(p.vw, coeffs.h_minus, hp);  // A- coefficients
  for (const auto& h : hp) aux.norm_a_minus += std::norm(h);
  synth_plus(hp, aux.a_minus_up, aux.a_minus_lo);
  block_matvec(p.ww, coeffs.h_minus, hm);  // B- coefficients
  synth_minus(hm, aux.b_minus_up, aux.b_minus_lo);
  return aux;
}

DensityDecomposition wavepacket_density(const PropagatorMatrix& p,
                                        const WavepacketCoefficients& coeffs,
                                        const ModeSynthesis& synth, const VacuumDensity& vac) {
  return combine_density(p.t, wavepacket_fields(p, coeffs, synth), vac);
}

DensityDecomposition combine_density(double t, const AuxiliaryFields& aux,
                                     const VacuumDensity& vac) {
  const std::size_t ns = vac.electron.size();
  DensityDecomposition d;
  d.t = t;
  d.rho1.resize(ns);
  d.rho2.resize(ns);
  d.rho3.resize(ns);
  d.rho_vac.resize(ns);
  d.rho_wp.resize(ns);
  d.rho_total.resize(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    const double ap = std::norm(aux.a_plus_up[j]) + std::norm(aux.a_plus_lo[j]);
    const double am = std::norm(aux.a_minus_up[j]) + std::norm(aux.a_minus_lo[j]);
    const double bp = std::norm(aux.b_plus_up[j]) + std::norm(aux.b_plus_lo[j]);
    const double bm = std::norm(aux.b_minus_up[j]) + std::norm(aux.b_minus_lo[j]);
    const cplx cross_main = std::conj(aux.a_plus_up[j]) * aux.b_minus_up[j] +
                            std::conj(aux.a_plus_lo[j]) * aux.b_minus_lo[j];
    const cplx cross_block = std::conj(aux.a_minus_up[j]) * aux.b_plus_up[j] +
                             std::conj(aux.a_minus_lo[j]) * aux.b_plus_lo[j];
    d.rho1[j] = vac.electron[j] + ap - am;
    d.rho2[j] = vac.positron[j] + bm - bp;
    d.rho3[j] = 2.0 * cross_main.real() - 2.0 * cross_block.real();
    d.rho_vac[j] = vac.electron[j] + vac.positron[j];
    d.rho_total[j] = d.rho1[j] + d.rho2[j] + d.rho3[j];
    d.rho_wp[j] = d.rho_total[j] - d.rho_vac[j];
  }
  return d;
}

WavepacketCoefficients free_evolve_coefficients(const WavepacketCoefficients& coeffs,
                                                const ModeBasis& basis, double t) {
  WavepacketCoefficients out = coeffs;
  for (std::size_t k = 0; k < basis.n_modes(); ++k) {
    const double theta = basis.energy(k) * t;
    const cplx down(std::cos(theta), -std::sin(theta));
    out.h_plus[k] *= down;             // e^{-i E t}
    out.h_minus[k] *= std::conj(down); // e^{+i E t}
  }
  return out;
}

ParticleCount particle_count(const DensityDecomposition& d, double sample_weight,
                             const AuxiliaryFields* aux) {
  ParticleCount c;
  double nt = 0.0, nv = 0.0;
  for (std::size_t j = 0; j < d.rho_total.size(); ++j) {
    nt += d.rho_total[j];
    nv += d.rho_vac[j];
  }
  c.n_total = nt * sample_weight;
  c.n_vac = nv * sample_weight;
  c.electrons_from_pairs = 0.5 * c.n_vac;
  if (aux != nullptr) c.blocking_deficit = aux->norm_b_plus + aux->norm_a_minus;
  return c;
}

std::optional<double> conditional_mean_position(std::span<const double> rho, const GridPair& grid,
                                                double a, double b) {
  double mass = 0.0, first = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double x = grid.x(j);
    if (x < a || x > b) continue;
    mass += rho[j];
    first += rho[j] * x;
  }
  mass *= grid.dx;
  first *= grid.dx;
  if (mass < 1e-12) return std::nullopt;
  return first / mass;
}

std::optional<double> conditional_mean_position(const DensityDecomposition& d,
                                                const GridPair& grid, double a, double b) {
  return conditional_mean_position(d.rho_wp, grid, a, b);
}

}  // namespace diracsea
