#include "diracsea/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace diracsea {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

GridPair make_grid(std::size_t n_points, double x_min, double x_max) {
  if (n_points < 8 || (n_points & (n_points - 1)) != 0) {
    throw std::invalid_argument("make_grid: n_points must be a power of two >= 8");
  }
  if (!(x_max > x_min)) {
    throw std::invalid_argument("make_grid: degenerate box (x_max <= x_min)");
  }
  GridPair g;
  g.n_points = n_points;
  g.x_min = x_min;
  g.x_max = x_max;
  const double box = x_max - x_min;
  g.dx = box / static_cast<double>(n_points);
  g.dp = 2.0 * std::numbers::pi / box;
  g.modes.resize(n_points);
  const auto half = static_cast<std::ptrdiff_t>(n_points / 2);
  for (std::size_t k = 0; k < n_points; ++k) {
    const auto j = static_cast<std::ptrdiff_t>(k) < half
                       ? static_cast<std::ptrdiff_t>(k)
                       : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n_points);
    g.modes[k] = g.dp * static_cast<double>(j);
  }
  return g;
}

std::size_t GridPair::index_at_or_above(double value) const {
  const double j = std::ceil((value - x_min) / dx - 1e-12);
  const auto idx = static_cast<std::ptrdiff_t>(j);
  if (idx < 0) return 0;
  if (idx >= static_cast<std::ptrdiff_t>(n_points)) return n_points - 1;
  return static_cast<std::size_t>(idx);
}

SpectralTransform::SpectralTransform(const GridPair& grid)
    : n_(grid.n_points),
      fwd_scale_(grid.dx / std::sqrt(2.0 * std::numbers::pi)),
      bwd_scale_(grid.dp / std::sqrt(2.0 * std::numbers::pi)) {
  twiddle_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const double phase = -grid.modes[k] * grid.x_min;
    twiddle_[k] = cplx(std::cos(phase), std::sin(phase));
  }
  buf_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n_));
  std::lock_guard<std::mutex> lock(planner_mutex());  // FFTW planning is not thread-safe
  plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n_), reinterpret_cast<fftw_complex*>(buf_),
                               reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n_), reinterpret_cast<fftw_complex*>(buf_),
                               reinterpret_cast<fftw_complex*>(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() {
  if (plan_fwd_ != nullptr) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_);
  }
}

SpectralTransform::SpectralTransform(SpectralTransform&& other) noexcept
    : n_(other.n_),
      fwd_scale_(other.fwd_scale_),
      bwd_scale_(other.bwd_scale_),
      twiddle_(std::move(other.twiddle_)),
      buf_(other.buf_),
      plan_fwd_(other.plan_fwd_),
      plan_bwd_(other.plan_bwd_) {
  other.plan_fwd_ = nullptr;
  other.plan_bwd_ = nullptr;
  other.buf_ = nullptr;
}

void SpectralTransform::to_momentum(std::span<const cplx> position, std::span<cplx> momentum) {
  if (position.size() != n_ || momentum.size() != n_) {
    throw std::invalid_argument("to_momentum: field length does not match grid");
  }
  std::memcpy(buf_, position.data(), sizeof(cplx) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  for (std::size_t k = 0; k < n_; ++k) momentum[k] = fwd_scale_ * twiddle_[k] * buf_[k];
}

void SpectralTransform::to_position(std::span<const cplx> momentum, std::span<cplx> position) {
  if (position.size() != n_ || momentum.size() != n_) {
    throw std::invalid_argument("to_position: field length does not match grid");
  }
  for (std::size_t k = 0; k < n_; ++k) buf_[k] = momentum[k] * std::conj(twiddle_[k]);
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  for (std::size_t j = 0; j < n_; ++j) position[j] = bwd_scale_ * buf_[j];
}

double SpinorField::norm_squared(double dx) const {
  double s = 0.0;
  for (std::size_t j = 0; j < up.size(); ++j) s += std::norm(up[j]) + std::norm(lo[j]);
  return s * dx;
}

void SpinorField::scale(double s) {
  for (auto& v : up) v *= s;
  for (auto& v : lo) v *= s;
}

std::vector<double> SpinorField::density() const {
  std::vector<double> d(up.size());
  for (std::size_t j = 0; j < up.size(); ++j) d[j] = std::norm(up[j]) + std::norm(lo[j]);
  return d;
}

}  // namespace diracsea
