#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace diracsea {

using cplx = std::complex<double>;

// Periodic spatial box [x_min, x_max) sampled at n_points (power of two) with
// its conjugate momentum lattice p_j = 2*pi*j / (x_max - x_min), j in [-n/2, n/2).
//
// Mode ordering is FFT-natural and fixed: index k holds j = k for k < n/2 and
// j = k - n for k >= n/2, so the single Nyquist mode j = -n/2 sits at k = n/2.
struct GridPair {
  std::size_t n_points = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  double dp = 0.0;
  std::vector<double> modes;  // momenta in FFT-natural order

  double box_length() const { return x_max - x_min; }
  double x(std::size_t j) const { return x_min + dx * static_cast<double>(j); }
  double momentum(std::size_t k) const { return modes[k]; }

  // Index of the mode with wavevector -modes[k]; the Nyquist mode maps to itself.
  std::size_t conjugate_index(std::size_t k) const {
    return k == 0 || k == n_points / 2 ? k : n_points - k;
  }

  // First grid index with x(j) >= value (clamped to the box).
  std::size_t index_at_or_above(double value) const;
};

GridPair make_grid(std::size_t n_points, double x_min, double x_max);

// Unitary spectral transforms between position samples and mode coefficients.
//
// Convention (continuum-mimicking):
//   to_momentum:  f~(p_k) = dx/sqrt(2*pi) * sum_j f(x_j) exp(-i p_k x_j)
//   to_position:  f(x_j)  = dp/sqrt(2*pi) * sum_k f~(p_k) exp(+i p_k x_j)
// With dx*dp*n = 2*pi the roundtrip is the identity and Parseval holds as
//   sum_j |f(x_j)|^2 dx = sum_k |f~(p_k)|^2 dp.
//
// Instances own FFTW plans and scratch; use one instance per thread.
class SpectralTransform {
 public:
  explicit SpectralTransform(const GridPair& grid);
  ~SpectralTransform();
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) = delete;
  SpectralTransform(const SpectralTransform&) = delete;

  std::size_t size() const { return n_; }
  void to_momentum(std::span<const cplx> position, std::span<cplx> momentum);
  void to_position(std::span<const cplx> momentum, std::span<cplx> position);

 private:
  std::size_t n_;
  double fwd_scale_, bwd_scale_;
  std::vector<cplx> twiddle_;  // exp(-i p_k x_min)
  cplx* buf_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Two-component complex field on the spatial grid (1D Dirac spinor).
struct SpinorField {
  std::vector<cplx> up, lo;

  SpinorField() = default;
  explicit SpinorField(std::size_t n) : up(n), lo(n) {}
  std::size_t size() const { return up.size(); }

  double norm_squared(double dx) const;      // sum (|up|^2 + |lo|^2) dx
  void scale(double s);
  std::vector<double> density() const;       // |up|^2 + |lo|^2 per point
};

}  // namespace diracsea
