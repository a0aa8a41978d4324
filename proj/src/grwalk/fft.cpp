#include "grwalk/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace grwalk {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct ComplexFft::Impl {
  fftw_complex* data = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (data) fftw_free(data);
  }
};

ComplexFft::ComplexFft(std::size_t n) : impl_(std::make_unique<Impl>()), n_(n) {
  if (n == 0) throw std::invalid_argument("ComplexFft: zero length");
  std::lock_guard lock(planner_mutex());
  impl_->data = fftw_alloc_complex(n);
  if (!impl_->data) throw std::bad_alloc();
  const int len = static_cast<int>(n);
  impl_->fwd = fftw_plan_dft_1d(len, impl_->data, impl_->data, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_1d(len, impl_->data, impl_->data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw std::runtime_error("ComplexFft: planning failed");
}

ComplexFft::~ComplexFft() = default;
ComplexFft::ComplexFft(ComplexFft&&) noexcept = default;
ComplexFft& ComplexFft::operator=(ComplexFft&&) noexcept = default;

std::span<std::complex<double>> ComplexFft::buffer() noexcept {
  return {reinterpret_cast<std::complex<double>*>(impl_->data), n_};
}

void ComplexFft::forward() { fftw_execute(impl_->fwd); }
void ComplexFft::inverse_unscaled() { fftw_execute(impl_->inv); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> lagged_products(std::span<const double> y, std::size_t max_lag) {
  const std::size_t n = y.size();
  if (max_lag >= n) throw std::invalid_argument("lagged_products: max_lag >= length");
  ComplexFft fft(next_pow2(n + max_lag + 1));
  auto buf = fft.buffer();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = i < n ? y[i] : 0.0;
  fft.forward();
  for (auto& z : buf) z = std::norm(z);
  fft.inverse_unscaled();
  const double scale = 1.0 / static_cast<double>(buf.size());
  std::vector<double> out(max_lag + 1);
  for (std::size_t l = 0; l <= max_lag; ++l) out[l] = buf[l].real() * scale;
  return out;
}

}  // namespace grwalk
