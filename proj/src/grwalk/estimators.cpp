#include "grwalk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "grwalk/fft.hpp"
#include "grwalk/parallel.hpp"

namespace grwalk {

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty sequence");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

Moments sample_moments(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("variance needs at least two values");
  const double mean = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(x.size() - 1)};
}

AcfTable autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (max_lag == 0) throw ValidationError("autocorrelation: max_lag must be positive");
  if (n <= max_lag) throw ValidationError("autocorrelation: series shorter than max_lag + 1");
  const double mean = sample_mean(x);
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = x[t] - mean;

  std::vector<double> s;
  // Direct sums are cheaper (and exact-order) for short inputs.
  if (n * (max_lag + 1) <= 4'000'000) {
    s.assign(max_lag + 1, 0.0);
    for (std::size_t l = 0; l <= max_lag; ++l) {
      double acc = 0.0;
      for (std::size_t t = 0; t + l < n; ++t) acc += y[t] * y[t + l];
      s[l] = acc;
    }
  } else {
    s = lagged_products(y, max_lag);
  }
  if (!(s[0] > 0.0)) throw ValidationError("autocorrelation undefined for a constant sequence");

  AcfTable table;
  table.max_lag = max_lag;
  table.n_obs = n;
  table.values.resize(max_lag);
  for (std::size_t l = 1; l <= max_lag; ++l)
    table.values[l - 1] = std::clamp(s[l] / s[0], -1.0, 1.0);
  return table;
}

double cumulative_acf(const AcfTable& table, std::size_t tau) {
  if (tau > table.max_lag) throw ValidationError("cumulative_acf: tau exceeds max_lag");
  return std::accumulate(table.values.begin(), table.values.begin() + static_cast<long>(tau), 0.0);
}

std::vector<double> cumulative_acf_curve(const AcfTable& table) {
  std::vector<double> out(table.values.size());
  std::partial_sum(table.values.begin(), table.values.end(), out.begin());
  return out;
}

KernelSums kernel_sums(std::span<const double> c_s, std::span<const double> c_w, std::size_t n) {
  if (n == 0) throw ValidationError("kernel_sums: n must be at least 1");
  KernelSums k;
  k.n = n;
  const std::size_t lags = std::max(c_s.size(), c_w.size());
  k.max_lag_used = std::min(n, lags);
  k.truncated = n > lags + 1;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t l = 1; l <= k.max_lag_used; ++l) {
    const double weight = 1.0 - static_cast<double>(l) * inv_n;
    const double cs = l <= c_s.size() ? c_s[l - 1] : 0.0;
    const double cw = l <= c_w.size() ? c_w[l - 1] : 0.0;
    k.K_s += weight * cs;
    k.K_w += weight * cw;
    k.K_sw += weight * cs * cw;
  }
  return k;
}

KernelSums kernel_sums(const AcfTable& acf_s, const AcfTable& acf_w, std::size_t n) {
  return kernel_sums(acf_s.values, acf_w.values, n);
}

std::size_t default_hill_k(std::size_t n) {
  return std::max<std::size_t>(1, n / 20);
}

TailIndexEstimate hill_tail_index(std::span<const double> values, std::size_t k) {
  if (k == 0 || k >= values.size())
    throw ValidationError("hill_tail_index: k must satisfy 1 <= k < sample length");
  std::vector<double> x(values.begin(), values.end());
  for (double v : x)
    if (!(v > 0.0)) throw ValidationError("hill_tail_index: values must be positive");
  // Largest k+1 values at the front, x[k] the (k+1)-th largest.
  std::nth_element(x.begin(), x.begin() + static_cast<long>(k), x.end(), std::greater<>());
  const double threshold = std::log(x[k]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(x[i]) - threshold;
  if (!(sum > 0.0)) throw ValidationError("hill_tail_index: top order statistics are tied");
  TailIndexEstimate est;
  est.k = k;
  est.alpha = static_cast<double>(k) / sum;
  est.standard_error = est.alpha / std::sqrt(static_cast<double>(k));
  return est;
}

DailyStationarity per_day_stationarity(const ReturnDecomposition& d, std::size_t min_events,
                                       double level, Deterministic det) {
  DailyStationarity out;
  out.level = level;
  std::size_t rej[4] = {0, 0, 0, 0};
  const auto days = d.days();
  const auto signs = d.signs();
  const auto sizes = d.sizes();

  auto rejects = [&](auto&& test, std::span<const double> x) {
    try {
      return test(x).p_value < level;
    } catch (const ValidationError&) {
      return false;  // degenerate day (e.g. constant signs)
    }
  };

  std::size_t begin = 0;
  while (begin < d.size()) {
    std::size_t end = begin;
    while (end < d.size() && days[end] == days[begin]) ++end;
    const std::size_t len = end - begin;
    if (len < min_events) {
      ++out.days_skipped;
    } else {
      ++out.days_tested;
      std::vector<double> s(signs.begin() + static_cast<long>(begin),
                            signs.begin() + static_cast<long>(end));
      std::span<const double> w = sizes.subspan(begin, len);
      auto adf = [&](std::span<const double> x) { return adf_test(x, std::nullopt, det); };
      auto pp = [&](std::span<const double> x) { return pp_test(x, std::nullopt, det); };
      rej[0] += rejects(adf, s);
      rej[1] += rejects(pp, s);
      rej[2] += rejects(adf, w);
      rej[3] += rejects(pp, w);
    }
    begin = end;
  }
  if (out.days_tested > 0) {
    const double n = static_cast<double>(out.days_tested);
    out.rejected.adf_signs = static_cast<double>(rej[0]) / n;
    out.rejected.pp_signs = static_cast<double>(rej[1]) / n;
    out.rejected.adf_sizes = static_cast<double>(rej[2]) / n;
    out.rejected.pp_sizes = static_cast<double>(rej[3]) / n;
  }
  return out;
}

CrossCorrelationTable cross_correlation(std::span<const double> x, std::span<const double> y,
                                        long min_lag, long max_lag) {
  const std::size_t n = x.size();
  if (y.size() != n) throw ValidationError("cross_correlation: length mismatch");
  if (n < 2) throw ValidationError("cross_correlation: need at least two observations");
  const long limit = static_cast<long>(n) - 1;
  if (min_lag > max_lag || min_lag < -limit || max_lag > limit)
    throw ValidationError("cross_correlation: lag range outside +/-(N-1)");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw ValidationError("cross_correlation undefined for constant input");
  const double denom = std::sqrt(sxx * syy);

  CrossCorrelationTable table;
  table.n_obs = n;
  table.band = 2.0 / std::sqrt(static_cast<double>(n));
  for (long lag = min_lag; lag <= max_lag; ++lag) {
    const std::size_t t0 = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
    const std::size_t t1 = lag > 0 ? n - static_cast<std::size_t>(lag) : n;
    double acc = 0.0;
    for (std::size_t t = t0; t < t1; ++t)
      acc += (x[t] - mx) * (y[static_cast<std::size_t>(static_cast<long>(t) + lag)] - my);
    table.lags.push_back(lag);
    table.values.push_back(acc / denom);
  }
  return table;
}

double block_bootstrap_stderr(std::span<const double> x,
                              const std::function<double(std::span<const double>)>& statistic,
                              std::size_t block_length, std::size_t replicates, std::uint64_t seed,
                              unsigned threads) {
  const std::size_t n = x.size();
  if (block_length == 0 || block_length > n)
    throw ValidationError("block_bootstrap_stderr: block length outside [1, N]");
  if (replicates < 2) throw ValidationError("block_bootstrap_stderr: need >= 2 replicates");
  std::vector<double> stats(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::uniform_int_distribution<std::size_t> start(0, n - block_length);
    std::vector<double> sample;
    sample.reserve(n + block_length);
    while (sample.size() < n) {
      const std::size_t s = start(rng);
      sample.insert(sample.end(), x.begin() + static_cast<long>(s),
                    x.begin() + static_cast<long>(s + block_length));
    }
    sample.resize(n);
    stats[r] = statistic(sample);
  });
  return std::sqrt(sample_moments(stats).variance);
}

}  // namespace grwalk
