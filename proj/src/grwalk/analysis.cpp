#include "grwalk/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "grwalk/parallel.hpp"

namespace grwalk {
namespace {

ComponentSummary summarize(std::span<const double> x, const AnalysisOptions& o,
                           std::size_t max_lag, std::uint64_t stream) {
  ComponentSummary c;
  c.moments = sample_moments(x);
  c.acf = autocorrelation(x, max_lag);
  c.cumulative_acf = cumulative_acf(c.acf, c.acf.max_lag);
  c.hurst = dfa_hurst(x, o.dfa);
  c.adf = adf_test(x, o.adf_lags, o.deterministic);
  c.pp = pp_test(x, std::nullopt, o.deterministic);
  if (o.bootstrap) {
    DfaOptions dfa = o.dfa;
    if (dfa.windows.empty())
      dfa.windows = default_dfa_windows(x.size(), dfa.num_windows, dfa.min_window);
    c.hurst_bootstrap_se = block_bootstrap_stderr(
        x, [&](std::span<const double> s) { return dfa_hurst(s, dfa).H; },
        o.bootstrap->block_length, o.bootstrap->replicates, derive_seed(o.bootstrap->seed, stream),
        o.threads);
  }
  return c;
}

}  // namespace

AnalysisReport run_analysis(const ReturnDecomposition& d, const AnalysisOptions& options) {
  if (d.size() < 20) throw ValidationError("analysis needs at least 20 events");
  AnalysisReport r;
  r.options = options;
  r.events = d.size();
  const auto days = d.days();
  r.trading_days = days.empty() ? 0 : 1;
  for (std::size_t t = 1; t < days.size(); ++t)
    if (days[t] != days[t - 1]) ++r.trading_days;
  r.mean_events_per_day = static_cast<double>(r.events) / static_cast<double>(r.trading_days);

  const std::size_t max_lag = std::min(options.max_lag, d.size() - 1);
  const auto signs = d.signs_as_real();
  const auto sizes = d.sizes();
  r.signs = summarize(signs, options, max_lag, 1);
  r.sizes = summarize(sizes, options, max_lag, 2);

  const std::size_t k = options.hill_k.value_or(default_hill_k(d.size()));
  r.tail = hill_tail_index(sizes, k);
  if (options.bootstrap) {
    r.tail_bootstrap_se = block_bootstrap_stderr(
        sizes, [k](std::span<const double> s) { return hill_tail_index(s, k).alpha; },
        options.bootstrap->block_length, options.bootstrap->replicates,
        derive_seed(options.bootstrap->seed, 0), options.threads);
  }

  r.daily = per_day_stationarity(d, options.day_min_events, options.level, options.deterministic);
  const long lag = std::min<long>(options.cross_lag, static_cast<long>(d.size()) - 1);
  r.cross = cross_correlation(signs, sizes, -lag, lag);
  return r;
}

}  // namespace grwalk
