#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace phasebeam::detail {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
T* allocate(std::size_t count) {
  void* p = fftw_malloc(sizeof(T) * count);
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

}  // namespace

RealFft2D::RealFft2D(std::size_t nx, std::size_t ny)
    : nx_(nx), ny_(ny), real_(nullptr), spec_(nullptr), plan_fwd_(nullptr), plan_inv_(nullptr) {
  real_ = allocate<double>(nx_ * ny_);
  spec_ = allocate<std::complex<double>>(nkx() * ny_);
  std::lock_guard lock(planner_mutex());
  auto* c = reinterpret_cast<fftw_complex*>(spec_);
  plan_fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(ny_), static_cast<int>(nx_), real_, c,
                                   FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_2d(static_cast<int>(ny_), static_cast<int>(nx_), c, real_,
                                   FFTW_ESTIMATE);
}

RealFft2D::~RealFft2D() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  }
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft2D::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void RealFft2D::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inv_)); }

RealFft1D::RealFft1D(std::size_t n)
    : n_(n), real_(nullptr), spec_(nullptr), plan_fwd_(nullptr), plan_inv_(nullptr) {
  real_ = allocate<double>(n_);
  spec_ = allocate<std::complex<double>>(n_ / 2 + 1);
  std::lock_guard lock(planner_mutex());
  auto* c = reinterpret_cast<fftw_complex*>(spec_);
  plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, c, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), c, real_, FFTW_ESTIMATE);
}

RealFft1D::~RealFft1D() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  }
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft1D::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void RealFft1D::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inv_)); }

}  // namespace phasebeam::detail
