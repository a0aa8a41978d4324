#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grwalk/types.hpp"

namespace grwalk {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor n - 1
};

/// Needs at least two values.
[[nodiscard]] Moments sample_moments(std::span<const double> x);
[[nodiscard]] double sample_mean(std::span<const double> x);

/// Biased (global-denominator) sample autocorrelation, so |c(l)| <= 1.
[[nodiscard]] AcfTable autocorrelation(std::span<const double> x, std::size_t max_lag);

/// C(tau) = c(1) + ... + c(tau).
[[nodiscard]] double cumulative_acf(const AcfTable& table, std::size_t tau);
[[nodiscard]] std::vector<double> cumulative_acf_curve(const AcfTable& table);

/// Triangular-weighted autocorrelation sums evaluated at n steps.
struct KernelSums {
  double K_s = 0.0;
  double K_w = 0.0;
  double K_sw = 0.0;
  std::size_t n = 0;
  std::size_t max_lag_used = 0;
  bool truncated = false;  // n - 1 exceeded the available lags
};

/// K(n) = sum_{l=1}^{min(n, M)} (1 - l/n) c(l). `c_s` and `c_w` hold c(1..M);
/// lags beyond their length contribute zero.
[[nodiscard]] KernelSums kernel_sums(std::span<const double> c_s, std::span<const double> c_w,
                                     std::size_t n);
[[nodiscard]] KernelSums kernel_sums(const AcfTable& acf_s, const AcfTable& acf_w, std::size_t n);

struct TailIndexEstimate {
  double alpha = 0.0;
  double standard_error = 0.0;
  std::size_t k = 0;
};

/// Hill estimator over the k largest values.
[[nodiscard]] TailIndexEstimate hill_tail_index(std::span<const double> values, std::size_t k);
/// Default k: 5% of the sample, at least 1.
[[nodiscard]] std::size_t default_hill_k(std::size_t n);

struct HurstEstimate {
  double H = 0.0;
  double standard_error = 0.0;
  std::vector<std::size_t> window_sizes;
  std::vector<double> fluctuations;
};

struct DfaOptions {
  std::vector<std::size_t> windows;  // empty: log-spaced defaults
  int detrend_order = 1;
  std::size_t num_windows = 20;
  std::size_t min_window = 10;
};

/// Log-spaced distinct integer windows from min_window to n/4.
[[nodiscard]] std::vector<std::size_t> default_dfa_windows(std::size_t n, std::size_t count,
                                                           std::size_t min_window);
[[nodiscard]] HurstEstimate dfa_hurst(std::span<const double> x, const DfaOptions& options = {});

[[nodiscard]] constexpr double gamma_from_hurst(double H) noexcept { return 2.0 - 2.0 * H; }

enum class UnitRootTest { ADF, PhillipsPerron };
enum class Deterministic { None, Constant, Trend };

[[nodiscard]] std::string to_string(UnitRootTest test);
[[nodiscard]] std::string to_string(Deterministic det);
/// "none", "constant" (or "drift"), "trend".
[[nodiscard]] Deterministic parse_deterministic(std::string_view text);

struct UnitRootResult {
  UnitRootTest test = UnitRootTest::ADF;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t lags = 0;
  double root = 0.0;  // estimated coefficient a in x_t = a x_{t-1} + ...
  std::size_t n_obs = 0;
};

/// Schwert rule floor(12 (n/100)^{1/4}).
[[nodiscard]] std::size_t schwert_lags(std::size_t n);

/// Approximate asymptotic p-value of a Dickey-Fuller tau statistic.
[[nodiscard]] double dickey_fuller_p_value(double tau, Deterministic det);

/// Augmented Dickey-Fuller with a fixed lag order (nullopt: Schwert rule,
/// capped so the regression keeps enough degrees of freedom).
[[nodiscard]] UnitRootResult adf_test(std::span<const double> x,
                                      std::optional<std::size_t> max_lags = std::nullopt,
                                      Deterministic det = Deterministic::Constant);
/// Phillips-Perron Z_tau with a Bartlett-kernel long-run variance.
[[nodiscard]] UnitRootResult pp_test(std::span<const double> x,
                                     std::optional<std::size_t> bandwidth = std::nullopt,
                                     Deterministic det = Deterministic::Constant);

struct RejectionFractions {
  std::optional<double> adf_signs, pp_signs, adf_sizes, pp_sizes;
};

struct DailyStationarity {
  std::size_t days_tested = 0;
  std::size_t days_skipped = 0;
  double level = 0.05;
  RejectionFractions rejected;  // nullopt when no day could be tested
};

/// Per-day ADF and PP on signs and sizes; days shorter than min_events skipped.
[[nodiscard]] DailyStationarity per_day_stationarity(const ReturnDecomposition& d,
                                                     std::size_t min_events = 20,
                                                     double level = 0.05,
                                                     Deterministic det = Deterministic::Constant);

struct CrossCorrelationTable {
  std::vector<long> lags;
  std::vector<double> values;  // corr(x_t, y_{t+lag})
  double band = 0.0;           // 2 / sqrt(N)
  std::size_t n_obs = 0;
};

[[nodiscard]] CrossCorrelationTable cross_correlation(std::span<const double> x,
                                                      std::span<const double> y, long min_lag,
                                                      long max_lag);

/// Moving-block bootstrap standard error of a scalar statistic.
[[nodiscard]] double block_bootstrap_stderr(
    std::span<const double> x, const std::function<double(std::span<const double>)>& statistic,
    std::size_t block_length, std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

}  // namespace grwalk
