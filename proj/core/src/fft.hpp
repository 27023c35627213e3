#pragma once

// Thin RAII wrappers over FFTW's real-to-complex transforms. Plans use
// FFTW_ESTIMATE so that equal sizes always produce the same plan and hence
// bit-identical output regardless of which thread runs them.

#include <complex>
#include <cstddef>
#include <span>

namespace phasebeam::detail {

class RealFft2D {
 public:
  /// nx is the fast (row) dimension.
  RealFft2D(std::size_t nx, std::size_t ny);
  ~RealFft2D();
  RealFft2D(const RealFft2D&) = delete;
  RealFft2D& operator=(const RealFft2D&) = delete;

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  /// Number of complex columns kept by the r2c transform (nx / 2 + 1).
  std::size_t nkx() const noexcept { return nx_ / 2 + 1; }

  std::span<double> real() noexcept { return {real_, nx_ * ny_}; }
  std::span<std::complex<double>> spectrum() noexcept { return {spec_, nkx() * ny_}; }

  void forward();
  /// Unnormalised inverse; divide by nx * ny afterwards.
  void inverse();

 private:
  std::size_t nx_;
  std::size_t ny_;
  double* real_;
  std::complex<double>* spec_;
  void* plan_fwd_;
  void* plan_inv_;
};

class RealFft1D {
 public:
  explicit RealFft1D(std::size_t n);
  ~RealFft1D();
  RealFft1D(const RealFft1D&) = delete;
  RealFft1D& operator=(const RealFft1D&) = delete;

  std::size_t n() const noexcept { return n_; }
  std::span<double> real() noexcept { return {real_, n_}; }
  std::span<std::complex<double>> spectrum() noexcept { return {spec_, n_ / 2 + 1}; }

  void forward();
  void inverse();

 private:
  std::size_t n_;
  double* real_;
  std::complex<double>* spec_;
  void* plan_fwd_;
  void* plan_inv_;
};

/// Signed DFT frequency index for bin i of an n-point transform.
inline long signed_frequency(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

}  // namespace phasebeam::detail
