#include <algorithm>
#include <cmath>

#include "grwalk/estimators.hpp"

namespace grwalk {
namespace {

// Orthonormal polynomial basis (degree 0..order) sampled on s equally spaced points,
// stored row-major as basis[q * s + i].
std::vector<double> polynomial_basis(std::size_t s, int order) {
  const std::size_t m = static_cast<std::size_t>(order) + 1;
  std::vector<double> basis(m * s);
  const double half = 0.5 * static_cast<double>(s - 1);
  for (std::size_t q = 0; q < m; ++q) {
    double* v = &basis[q * s];
    for (std::size_t i = 0; i < s; ++i)
      v[i] = std::pow(half > 0 ? (static_cast<double>(i) - half) / half : 0.0,
                      static_cast<double>(q));
    // Modified Gram-Schmidt, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < q; ++p) {
        const double* u = &basis[p * s];
        double dot = 0.0;
        for (std::size_t i = 0; i < s; ++i) dot += u[i] * v[i];
        for (std::size_t i = 0; i < s; ++i) v[i] -= dot * u[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < s; ++i) norm += v[i] * v[i];
    norm = std::sqrt(norm);
    if (!(norm > 1e-12)) throw ValidationError("dfa: window too short for the detrending order");
    for (std::size_t i = 0; i < s; ++i) v[i] /= norm;
  }
  return basis;
}

}  // namespace

std::vector<std::size_t> default_dfa_windows(std::size_t n, std::size_t count,
                                             std::size_t min_window) {
  const std::size_t max_window = n / 4;
  if (count < 2 || max_window <= min_window)
    throw ValidationError("dfa: series too short for the default window range");
  std::vector<std::size_t> windows;
  const double lo = std::log(static_cast<double>(min_window));
  const double hi = std::log(static_cast<double>(max_window));
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    const auto s = static_cast<std::size_t>(std::llround(std::exp(lo + f * (hi - lo))));
    if (windows.empty() || s > windows.back()) windows.push_back(std::min(s, max_window));
  }
  return windows;
}

HurstEstimate dfa_hurst(std::span<const double> x, const DfaOptions& options) {
  if (options.detrend_order < 0 || options.detrend_order > 5)
    throw ValidationError("dfa: detrend order must be in [0, 5]");
  std::vector<std::size_t> windows = options.windows.empty()
                                         ? default_dfa_windows(x.size(), options.num_windows,
                                                               options.min_window)
                                         : options.windows;
  if (windows.size() < 4) throw ValidationError("dfa: need at least four window sizes");
  for (std::size_t i = 1; i < windows.size(); ++i)
    if (windows[i] <= windows[i - 1]) throw ValidationError("dfa: windows must strictly increase");
  if (x.size() < 4 * windows.back()) throw ValidationError("dfa: series shorter than 4 x max window");
  if (windows.front() < static_cast<std::size_t>(options.detrend_order) + 2)
    throw ValidationError("dfa: smallest window too short for the detrending order");

  const double mean = sample_mean(x);
  std::vector<double> profile(x.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    acc += x[t] - mean;
    profile[t] = acc;
  }

  HurstEstimate est;
  est.window_sizes = windows;
  const std::size_t m = static_cast<std::size_t>(options.detrend_order) + 1;
  std::vector<double> residual;
  for (std::size_t s : windows) {
    const auto basis = polynomial_basis(s, options.detrend_order);
    const std::size_t segments = x.size() / s;
    residual.resize(s);
    double total = 0.0;
    for (std::size_t j = 0; j < segments; ++j) {
      const double* y = &profile[j * s];
      std::copy(y, y + s, residual.begin());
      for (std::size_t q = 0; q < m; ++q) {
        const double* u = &basis[q * s];
        double dot = 0.0;
        for (std::size_t i = 0; i < s; ++i) dot += u[i] * residual[i];
        for (std::size_t i = 0; i < s; ++i) residual[i] -= dot * u[i];
      }
      for (double r : residual) total += r * r;
    }
    est.fluctuations.push_back(std::sqrt(total / static_cast<double>(segments * s)));
  }
  for (double f : est.fluctuations)
    if (!(f > 0.0)) throw ValidationError("dfa: degenerate (constant) input");

  // Least-squares slope of log F against log s.
  const std::size_t k = windows.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    lx[i] = std::log(static_cast<double>(windows[i]));
    ly[i] = std::log(est.fluctuations[i]);
  }
  const double mx = sample_mean(lx), my = sample_mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  est.H = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = ly[i] - my - est.H * (lx[i] - mx);
    rss += e * e;
  }
  est.standard_error = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
  return est;
}

}  // namespace grwalk
