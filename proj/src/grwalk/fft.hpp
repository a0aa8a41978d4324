#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace grwalk {

/// In-place forward complex DFT of a fixed length, X_k = sum_j x_j e^{-2 pi i jk/n}.
/// One plan per instance; execute() is safe to call from several threads on
/// distinct instances.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;
  ComplexFft(ComplexFft&&) noexcept;
  ComplexFft& operator=(ComplexFft&&) noexcept;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::span<std::complex<double>> buffer() noexcept;
  void forward();
  void inverse_unscaled();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_ = 0;
};

/// Sums S(l) = sum_{t=0}^{N-1-l} y_t y_{t+l} for l = 0..max_lag via zero-padded FFT.
[[nodiscard]] std::vector<double> lagged_products(std::span<const double> y, std::size_t max_lag);

[[nodiscard]] std::size_t next_pow2(std::size_t n);

}  // namespace grwalk
