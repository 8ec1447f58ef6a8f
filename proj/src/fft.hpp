#pragma once

// Thin RAII wrappers over FFTW real transforms of one length.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>

namespace specdep::detail {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Unscaled forward transform x_t -> X_w = sum_t x_t exp(-2 pi i w t / n).
class RealForwardPlan {
 public:
  explicit RealForwardPlan(std::size_t n)
      : n_(n), in_(fftw_alloc_real(n)), out_(fftw_alloc_complex(n / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealForwardPlan() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealForwardPlan(const RealForwardPlan&) = delete;
  RealForwardPlan& operator=(const RealForwardPlan&) = delete;

  double* input() noexcept { return in_; }
  void execute() noexcept { fftw_execute(plan_); }
  /// Bin w in 0..n-1, using conjugate symmetry above n/2.
  std::complex<double> bin(std::size_t w) const noexcept {
    if (w <= n_ / 2) return {out_[w][0], out_[w][1]};
    const std::size_t mirror = n_ - w;
    return {out_[mirror][0], -out_[mirror][1]};
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

/// Inverse of RealForwardPlan including the 1/n factor, from the half spectrum 0..n/2.
class RealInversePlan {
 public:
  explicit RealInversePlan(std::size_t n)
      : n_(n), in_(fftw_alloc_complex(n / 2 + 1)), out_(fftw_alloc_real(n)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealInversePlan() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealInversePlan(const RealInversePlan&) = delete;
  RealInversePlan& operator=(const RealInversePlan&) = delete;

  void clear() noexcept {
    for (std::size_t w = 0; w <= n_ / 2; ++w) in_[w][0] = in_[w][1] = 0.0;
  }
  void set_bin(std::size_t w, std::complex<double> z) noexcept {
    in_[w][0] = z.real();
    in_[w][1] = z.imag();
  }
  /// Executes (destroying the input) and scales by 1/n.
  const double* execute() noexcept {
    fftw_execute(plan_);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t t = 0; t < n_; ++t) out_[t] *= inv;
    return out_;
  }

 private:
  std::size_t n_;
  fftw_complex* in_;
  double* out_;
  fftw_plan plan_;
};

}  // namespace specdep::detail
