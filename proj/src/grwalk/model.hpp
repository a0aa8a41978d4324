#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grwalk/estimators.hpp"
#include "grwalk/ingestion.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

/// Sign and size moments of one stretch of the walk.
struct StepMoments {
  double mu_s = 0.0;
  double sigma2_s = 0.0;
  double mu_w = 0.0;
  double sigma2_w = 0.0;
};

struct PredictedVariance {
  double value = 0.0;
  bool breakdown = false;  // value <= 0: the kernel terms overwhelmed the variance
};

/// Predicted squared volatility of an n-step generalized random walk:
///
///   V = n { [1 + 2 s2_s K_sw(n) + 2 mu_s^2 K_w(n)] s2_w
///         + [1 + 2 s2_s K_s(n) - mu_s^2] mu_w^2 }
///
/// where the K are the triangular-weighted sign, size and product
/// autocorrelation sums at n steps.
[[nodiscard]] PredictedVariance predicted_variance(const StepMoments& m, std::size_t n,
                                                   const KernelSums& ks);

/// R^2 / V; V must be positive.
[[nodiscard]] double rho(double R, double V_hat);

/// Fixed-length wall-clock windows per trading day, starting at the trimmed
/// session open. A trailing window that does not fit is dropped.
[[nodiscard]] IntervalPartition partition_intervals(const ReturnDecomposition& d,
                                                    Nanoseconds interval_length,
                                                    const SessionConfig& session);

/// Consecutive runs of events with the given counts (event-count sampling).
[[nodiscard]] IntervalPartition partition_by_counts(const ReturnDecomposition& d,
                                                    std::span<const std::size_t> counts);

/// Kernel sums at arbitrary n from global autocorrelation tables.
class KernelSumProvider {
 public:
  KernelSumProvider(AcfTable signs, AcfTable sizes);
  [[nodiscard]] KernelSums operator()(std::size_t n) const;
  [[nodiscard]] const AcfTable& sign_acf() const noexcept { return signs_; }
  [[nodiscard]] const AcfTable& size_acf() const noexcept { return sizes_; }

 private:
  AcfTable signs_;
  AcfTable sizes_;
};

/// ACFs of the whole series with max_lag clamped to N - 1. A constant
/// component gets an all-zero table.
[[nodiscard]] KernelSumProvider global_kernel_provider(const ReturnDecomposition& d,
                                                       std::size_t max_lag);

struct RhoBin {
  double mean_V_hat = 0.0;
  double mean_rho = 0.0;
  std::optional<double> standard_error;  // undefined for single-interval or zero-spread bins
  std::size_t count = 0;
};

struct WeightedMean {
  double value = 0.0;
  double standard_error = 0.0;
};

struct SkipCounts {
  std::size_t too_few_events = 0;
  std::size_t nonpositive_V_hat = 0;
};

struct RhoReport {
  Nanoseconds interval_length{0};
  std::vector<IntervalRecord> per_interval;
  SkipCounts skipped;
  std::size_t truncated_kernel_intervals = 0;  // intervals with n - 1 > max lag
  std::vector<RhoBin> bins;
  std::optional<WeightedMean> weighted_mean_rho;
  std::optional<WeightedMean> raw_mean_rho;  // plain mean over intervals
};

struct AnalyzeOptions {
  std::size_t min_events = 2;
};

/// Per-interval moments, V-hat from global kernel sums, and rho. Intervals
/// with fewer than min_events events or non-positive V-hat are skipped.
[[nodiscard]] RhoReport analyze_intervals(const ReturnDecomposition& d,
                                          const IntervalPartition& partition,
                                          const KernelSumProvider& kernels,
                                          const AnalyzeOptions& options = {});

/// Quantile bins of near-equal count over intervals sorted by V-hat (stable).
[[nodiscard]] std::vector<RhoBin> bin_by_expected_volatility(
    std::span<const IntervalRecord> intervals, std::size_t num_bins);

/// Inverse-variance weighted mean of bin means over bins with a defined error.
[[nodiscard]] WeightedMean weighted_mean_rho(std::span<const RhoBin> bins);

[[nodiscard]] WeightedMean raw_mean_rho(std::span<const IntervalRecord> intervals);

struct ModelOptions {
  std::size_t max_lag = 1000;
  std::size_t bins = 10;
  std::size_t min_events = 2;
};

/// Global ACFs, interval analysis, binning and the summary means in one call.
[[nodiscard]] RhoReport run_model(const ReturnDecomposition& d, const IntervalPartition& partition,
                                  const ModelOptions& options);

}  // namespace grwalk
