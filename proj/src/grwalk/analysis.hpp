#pragma once

#include <cstdint>
#include <optional>

#include "grwalk/estimators.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

struct BootstrapOptions {
  std::size_t block_length = 100;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
};

struct AnalysisOptions {
  std::size_t max_lag = 1000;
  std::optional<std::size_t> hill_k;  // nullopt: default_hill_k
  DfaOptions dfa;
  Deterministic deterministic = Deterministic::Constant;
  std::optional<std::size_t> adf_lags;  // nullopt: Schwert rule
  long cross_lag = 10;
  std::size_t day_min_events = 20;
  double level = 0.05;
  std::optional<BootstrapOptions> bootstrap;
  unsigned threads = 1;
};

struct ComponentSummary {
  Moments moments;
  AcfTable acf;
  double cumulative_acf = 0.0;  // C(max lag)
  HurstEstimate hurst;
  UnitRootResult adf;
  UnitRootResult pp;
  std::optional<double> hurst_bootstrap_se;
};

/// Summary statistics of a decomposition: counts, tail index, memory and
/// stationarity of each component, and the sign-size cross-correlation.
struct AnalysisReport {
  AnalysisOptions options;
  std::size_t events = 0;
  std::size_t trading_days = 0;
  double mean_events_per_day = 0.0;
  ComponentSummary signs;
  ComponentSummary sizes;
  TailIndexEstimate tail;
  std::optional<double> tail_bootstrap_se;
  DailyStationarity daily;
  CrossCorrelationTable cross;
};

[[nodiscard]] AnalysisReport run_analysis(const ReturnDecomposition& d,
                                          const AnalysisOptions& options);

}  // namespace grwalk
