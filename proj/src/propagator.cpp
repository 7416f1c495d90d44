#include "diracsea/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "diracsea/parallel.hpp"
#include "diracsea/units.hpp"

namespace diracsea {

namespace {

constexpr double kC = units::light_speed;
constexpr double kMc2 = units::rest_energy;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Hot-loop engine: unnormalized in-place FFTs executed directly on the column
// memory. The spectral twiddle/scale factors commute with the diagonal kinetic
// factor, so the stepping needs only raw transforms with 1/N folded into the
// potential phases. Arrays must carry fftw_malloc alignment.
class RawFft {
 public:
  explicit RawFft(std::size_t n) : n_(n) {
    buf_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n));
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~RawFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  RawFft(const RawFft&) = delete;

  void forward(cplx* a) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(a), reinterpret_cast<fftw_complex*>(a));
  }
  void backward(cplx* a) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(a), reinterpret_cast<fftw_complex*>(a));
  }

 private:
  std::size_t n_;
  cplx* buf_;
  fftw_plan fwd_, bwd_;
};

struct AlignedDeleter {
  void operator()(cplx* p) const { fftw_free(p); }
};
using AlignedArray = std::unique_ptr<cplx[], AlignedDeleter>;

AlignedArray aligned_alloc_cplx(std::size_t n) {
  return AlignedArray(static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n)));
}

std::array<cplx, 4> kinetic_block(double m, double energy, double dt) {
  const double theta = energy * dt;
  const double c = std::cos(theta);
  const double f = std::sin(theta) / energy;
  return {cplx(c, -f * kMc2), cplx(0.0, -f * kC * m),
          cplx(0.0, -f * kC * m), cplx(c, f * kMc2)};
}

inline void apply_kinetic(std::span<const std::array<cplx, 4>> table, std::span<cplx> fu,
                          std::span<cplx> fl) {
  const std::size_t n = fu.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& m = table[k];
    const cplx a = fu[k], b = fl[k];
    fu[k] = m[0] * a + m[1] * b;
    fl[k] = m[2] * a + m[3] * b;
  }
}

inline void apply_potential(std::span<const cplx> phase, std::span<cplx> u, std::span<cplx> l) {
  const std::size_t n = u.size();
  for (std::size_t j = 0; j < n; ++j) {
    u[j] *= phase[j];
    l[j] *= phase[j];
  }
}

double edge_ratio(std::span<const cplx> u, std::span<const cplx> l) {
  const std::size_t n = u.size();
  const std::size_t w = 4;
  double global = 0.0;
  for (std::size_t j = 0; j < n; ++j) global = std::max(global, std::norm(u[j]) + std::norm(l[j]));
  if (global <= 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t j = 0; j < w; ++j) {
    edge = std::max(edge, std::norm(u[j]) + std::norm(l[j]));
    edge = std::max(edge, std::norm(u[n - 1 - j]) + std::norm(l[n - 1 - j]));
  }
  return edge / global;
}

// Fused evolution of one spinor column, position rep in/out; up/lo must be
// fftw-aligned. Equivalent to n_steps applications of the symmetric step: the
// raw-transform representation differs from the normalized one only by per-mode
// phases and a 1/N scale, both of which commute with the kinetic factor.
// monitor != nullptr enables the per-step edge-density ratio.
void evolve_fused(cplx* up, cplx* lo, const SplitStepper& st, const RawFft& fft,
                  std::size_t n_steps, double* monitor) {
  if (n_steps == 0) return;
  const std::size_t n = st.grid->n_points;
  std::span<cplx> su(up, n), sl(lo, n);
  fft.forward(up);
  fft.forward(lo);
  apply_kinetic(st.kin_half, su, sl);
  for (std::size_t s = 0; s < n_steps; ++s) {
    fft.backward(up);
    fft.backward(lo);
    apply_potential(st.pot_phase_over_n, su, sl);
    if (monitor != nullptr) *monitor = std::max(*monitor, edge_ratio(su, sl));
    fft.forward(up);
    fft.forward(lo);
    apply_kinetic(s + 1 == n_steps ? st.kin_half : st.kin_full, su, sl);
  }
  fft.backward(up);
  fft.backward(lo);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    up[j] *= inv_n;
    lo[j] *= inv_n;
  }
}

}  // namespace

SplitStepper SplitStepper::make(const ModeBasis& basis, std::span<const double> potential,
                                double dt) {
  if (dt <= 0.0) throw std::invalid_argument("SplitStepper: dt must be positive");
  const GridPair& grid = basis.grid();
  if (potential.size() != grid.n_points) {
    throw std::invalid_argument("SplitStepper: potential table does not match grid");
  }
  SplitStepper st;
  st.grid = &grid;
  st.basis = &basis;
  st.dt = dt;
  st.kin_full.resize(grid.n_points);
  st.kin_half.resize(grid.n_points);
  st.pot_phase.resize(grid.n_points);
  st.pot_phase_over_n.resize(grid.n_points);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    st.kin_full[k] = kinetic_block(grid.modes[k], basis.energy(k), dt);
    st.kin_half[k] = kinetic_block(grid.modes[k], basis.energy(k), 0.5 * dt);
  }
  const double inv_n = 1.0 / static_cast<double>(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double phase = -potential[j] * dt;
    st.pot_phase[j] = cplx(std::cos(phase), std::sin(phase));
    st.pot_phase_over_n[j] = st.pot_phase[j] * inv_n;
  }
  return st;
}

void step(SpinorField& field, const SplitStepper& st, SpectralTransform& tr) {
  if (field.size() != st.grid->n_points) throw std::invalid_argument("step: grid mismatch");
  const std::size_t n = field.size();
  std::vector<cplx> fu(n), fl(n);
  tr.to_momentum(field.up, fu);
  tr.to_momentum(field.lo, fl);
  apply_kinetic(st.kin_half, fu, fl);
  tr.to_position(fu, field.up);
  tr.to_position(fl, field.lo);
  apply_potential(st.pot_phase, field.up, field.lo);
  tr.to_momentum(field.up, fu);
  tr.to_momentum(field.lo, fl);
  apply_kinetic(st.kin_half, fu, fl);
  tr.to_position(fu, field.up);
  tr.to_position(fl, field.lo);
}

EvolveReport evolve_field(SpinorField& field, const SplitStepper& st, std::size_t n_steps,
                          bool monitor_edges) {
  if (field.size() != st.grid->n_points) throw std::invalid_argument("evolve_field: grid mismatch");
  const std::size_t n = field.size();
  EvolveReport report;
  const RawFft fft(n);
  AlignedArray up = aligned_alloc_cplx(n), lo = aligned_alloc_cplx(n);
  std::copy(field.up.begin(), field.up.end(), up.get());
  std::copy(field.lo.begin(), field.lo.end(), lo.get());
  evolve_fused(up.get(), lo.get(), st, fft, n_steps,
               monitor_edges ? &report.edge_density_max : nullptr);
  std::copy_n(up.get(), n, field.up.begin());
  std::copy_n(lo.get(), n, field.lo.begin());
  return report;
}

PropagatorMatrix::PropagatorMatrix(std::size_t n_modes, double time)
    : n(n_modes), t(time), vv(n * n), vw(n * n), wv(n * n), ww(n * n) {}

PropagatorMatrix PropagatorMatrix::identity(std::size_t n_modes) {
  PropagatorMatrix m(n_modes, 0.0);
  for (std::size_t k = 0; k < n_modes; ++k) {
    m.vv[k + n_modes * k] = 1.0;
    m.ww[k + n_modes * k] = 1.0;
  }
  return m;
}

cplx PropagatorMatrix::block_at(int row_branch, int col_branch, std::size_t r,
                                std::size_t c) const {
  const auto& blk = row_branch == 0 ? (col_branch == 0 ? vv : vw) : (col_branch == 0 ? wv : ww);
  return blk[r + n * c];
}

PropagatorMatrix free_propagator_matrix(const ModeBasis& basis, double t) {
  PropagatorMatrix m(basis.n_modes(), t);
  for (std::size_t k = 0; k < basis.n_modes(); ++k) {
    const double theta = basis.energy(k) * t;
    m.vv[k + m.n * k] = cplx(std::cos(theta), -std::sin(theta));
    m.ww[k + m.n * k] = cplx(std::cos(theta), std::sin(theta));
  }
  return m;
}

PropagatorBuild::PropagatorBuild(const ModeBasis& basis, const SplitStepper& stepper,
                                 unsigned threads)
    : basis_(&basis), stepper_(&stepper), threads_(resolve_threads(threads)) {
  const GridPair& grid = basis.grid();
  const std::size_t n = grid.n_points;
  col_up_.resize(2 * n * n);
  col_lo_.resize(2 * n * n);
  const double amp = std::sqrt(grid.dp / (2.0 * std::numbers::pi));
  for (std::size_t c = 0; c < 2 * n; ++c) {
    const std::size_t k = c % n;       // wavevector bin
    const bool positive = c < n;       // v-columns first, then w-columns
    const auto& u = positive ? basis.u_plus(k) : basis.u_minus(k);
    const double m = grid.modes[k];
    cplx* cu = col_up_.data() + c * n;
    cplx* cl = col_lo_.data() + c * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = m * grid.x(j);
      const cplx wave = amp * cplx(std::cos(phase), std::sin(phase));
      cu[j] = u[0] * wave;
      cl[j] = u[1] * wave;
    }
  }
}

void PropagatorBuild::advance(std::size_t n_steps) {
  if (n_steps == 0) return;
  const std::size_t n = basis_->grid().n_points;
  parallel_for_blocks(2 * n, threads_, [&](std::size_t lo, std::size_t hi) {
    const RawFft fft(n);
    AlignedArray up = aligned_alloc_cplx(n), lw = aligned_alloc_cplx(n);
    for (std::size_t c = lo; c < hi; ++c) {
      std::copy_n(col_up_.data() + c * n, n, up.get());
      std::copy_n(col_lo_.data() + c * n, n, lw.get());
      evolve_fused(up.get(), lw.get(), *stepper_, fft, n_steps, nullptr);
      std::copy_n(up.get(), n, col_up_.data() + c * n);
      std::copy_n(lw.get(), n, col_lo_.data() + c * n);
    }
  });
  steps_done_ += n_steps;
}

PropagatorMatrix PropagatorBuild::project() const {
  const std::size_t n = basis_->grid().n_points;
  PropagatorMatrix m(n, current_time());
  const GridPair& grid = basis_->grid();
  parallel_for_blocks(2 * n, threads_, [&](std::size_t lo, std::size_t hi) {
    SpectralTransform tr(grid);
    std::vector<cplx> hp(n), hm(n);
    SpinorField f(n);
    for (std::size_t c = lo; c < hi; ++c) {
      std::copy_n(col_up_.data() + c * n, n, f.up.begin());
      std::copy_n(col_lo_.data() + c * n, n, f.lo.begin());
      basis_->project(f, tr, hp, hm);
      const std::size_t col = c % n;
      cplx* top = (c < n ? m.vv.data() : m.vw.data()) + col * n;
      cplx* bot = (c < n ? m.wv.data() : m.ww.data()) + col * n;
      std::copy_n(hp.data(), n, top);
      std::copy_n(hm.data(), n, bot);
    }
  });
  return m;
}

double unitarity_defect(const PropagatorMatrix& m, unsigned threads) {
  const std::size_t n = m.n;
  const std::size_t dim = 2 * n;
  // Row-major copy of the assembled matrix keeps the dot products contiguous.
  std::vector<cplx> rows(dim * dim);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      rows[r * dim + c] = m.vv[r + n * c];
      rows[r * dim + (n + c)] = m.vw[r + n * c];
      rows[(n + r) * dim + c] = m.wv[r + n * c];
      rows[(n + r) * dim + (n + c)] = m.ww[r + n * c];
    }
  }
  std::vector<double> row_max(dim, 0.0);
  parallel_for_blocks(dim, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const cplx* ri = rows.data() + i * dim;
      for (std::size_t j = i; j < dim; ++j) {
        const cplx* rj = rows.data() + j * dim;
        cplx acc{};
        for (std::size_t k = 0; k < dim; ++k) acc += ri[k] * std::conj(rj[k]);
        if (i == j) acc -= 1.0;
        row_max[i] = std::max(row_max[i], std::abs(acc));
      }
    }
  });
  double defect = 0.0;
  for (const double v : row_max) defect = std::max(defect, v);
  return defect;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); }
void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<char*>(&v), 8); }

void write_block_row_major(std::ostream& os, const std::vector<cplx>& blk, std::size_t n) {
  std::vector<double> row(2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      row[2 * c] = blk[r + n * c].real();
      row[2 * c + 1] = blk[r + n * c].imag();
    }
    os.write(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(16 * n));
  }
}

void read_block_row_major(std::istream& is, std::vector<cplx>& blk, std::size_t n) {
  std::vector<double> row(2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(16 * n));
    for (std::size_t c = 0; c < n; ++c) blk[r + n * c] = cplx(row[2 * c], row[2 * c + 1]);
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const PropagatorMatrix& m) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint layout assumes a little-endian host");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os.write("DSPM", 4);
  write_u32(os, 1);
  write_u64(os, m.n);
  write_f64(os, m.t);
  write_block_row_major(os, m.vv, m.n);
  write_block_row_major(os, m.vw, m.n);
  write_block_row_major(os, m.wv, m.n);
  write_block_row_major(os, m.ww, m.n);
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

PropagatorMatrix load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "DSPM", 4) != 0) throw std::runtime_error("load_checkpoint: bad magic");
  std::uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("load_checkpoint: unsupported version");
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), 8);
  double t = 0.0;
  is.read(reinterpret_cast<char*>(&t), 8);
  PropagatorMatrix m(static_cast<std::size_t>(n), t);
  read_block_row_major(is, m.vv, m.n);
  read_block_row_major(is, m.vw, m.n);
  read_block_row_major(is, m.wv, m.n);
  read_block_row_major(is, m.ww, m.n);
  if (!is) throw std::runtime_error("load_checkpoint: truncated file " + path);
  return m;
}

}  // namespace diracsea
