#include "grwalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grwalk {

PredictedVariance predicted_variance(const StepMoments& m, std::size_t n, const KernelSums& ks) {
  if (n == 0) throw ValidationError("predicted_variance: n must be at least 1");
  if (m.sigma2_w < 0.0) throw ValidationError("predicted_variance: negative size variance");
  if (std::abs(m.mu_s) > 1.0) throw ValidationError("predicted_variance: |mu_s| > 1");
  const double mu_s2 = m.mu_s * m.mu_s;
  const double size_term = (1.0 + 2.0 * m.sigma2_s * ks.K_sw + 2.0 * mu_s2 * ks.K_w) * m.sigma2_w;
  const double mean_term = (1.0 + 2.0 * m.sigma2_s * ks.K_s - mu_s2) * m.mu_w * m.mu_w;
  PredictedVariance v;
  v.value = static_cast<double>(n) * (size_term + mean_term);
  v.breakdown = !(v.value > 0.0);
  return v;
}

double rho(double R, double V_hat) {
  if (!(V_hat > 0.0)) throw ValidationError("rho: predicted variance must be positive");
  return R * R / V_hat;
}

IntervalPartition partition_intervals(const ReturnDecomposition& d, Nanoseconds interval_length,
                                      const SessionConfig& session) {
  session.validate();
  if (interval_length.count() <= 0) throw ValidationError("interval length must be positive");
  IntervalPartition part;
  part.interval_length = interval_length;
  const auto ts = d.timestamps();
  const auto days = d.days();
  const auto window = session.window_end() - session.window_start();
  const auto per_day = static_cast<std::size_t>(window / interval_length);

  std::size_t begin = 0;
  while (begin < d.size()) {
    std::size_t end = begin;
    while (end < d.size() && days[end] == days[begin]) ++end;
    const Timestamp midnight{days[begin].time_since_epoch()};
    const Timestamp open = midnight + session.window_start();
    for (std::size_t k = 0; k < per_day; ++k) {
      Interval iv;
      iv.start = open + interval_length * static_cast<long>(k);
      iv.end = iv.start + interval_length;
      iv.begin = static_cast<std::size_t>(
          std::lower_bound(ts.begin() + static_cast<long>(begin), ts.begin() + static_cast<long>(end),
                           iv.start) -
          ts.begin());
      iv.end_index = static_cast<std::size_t>(
          std::lower_bound(ts.begin() + static_cast<long>(iv.begin),
                           ts.begin() + static_cast<long>(end), iv.end) -
          ts.begin());
      part.intervals.push_back(iv);
    }
    begin = end;
  }
  return part;
}

IntervalPartition partition_by_counts(const ReturnDecomposition& d,
                                      std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total > d.size())
    throw ValidationError("partition_by_counts: counts sum to " + std::to_string(total) +
                          " but the series has " + std::to_string(d.size()) + " events");
  IntervalPartition part;
  const auto ts = d.timestamps();
  std::size_t pos = 0;
  for (std::size_t c : counts) {
    Interval iv;
    iv.begin = pos;
    iv.end_index = pos + c;
    if (c > 0) {
      iv.start = ts[pos];
      iv.end = ts[pos + c - 1];
    } else if (pos < ts.size()) {
      iv.start = iv.end = ts[pos];
    }
    part.intervals.push_back(iv);
    pos += c;
  }
  return part;
}

KernelSumProvider::KernelSumProvider(AcfTable signs, AcfTable sizes)
    : signs_(std::move(signs)), sizes_(std::move(sizes)) {}

KernelSums KernelSumProvider::operator()(std::size_t n) const {
  return kernel_sums(signs_, sizes_, n);
}

KernelSumProvider global_kernel_provider(const ReturnDecomposition& d, std::size_t max_lag) {
  if (d.size() < 2) throw ValidationError("need at least two events for autocorrelations");
  const std::size_t lag = std::min(max_lag, d.size() - 1);
  // A constant component has no correlation to speak of; its kernel terms are
  // multiplied by a zero variance anyway.
  const auto acf = [lag](std::span<const double> x) {
    if (std::ranges::all_of(x, [&](double v) { return v == x.front(); }))
      return AcfTable{lag, std::vector<double>(lag, 0.0), x.size()};
    return autocorrelation(x, lag);
  };
  const auto signs = d.signs_as_real();
  return {acf(signs), acf(d.sizes())};
}

RhoReport analyze_intervals(const ReturnDecomposition& d, const IntervalPartition& partition,
                            const KernelSumProvider& kernels, const AnalyzeOptions& options) {
  RhoReport report;
  report.interval_length = partition.interval_length;
  const auto signs = d.signs();
  const auto sizes = d.sizes();
  const std::size_t min_events = std::max<std::size_t>(options.min_events, 2);

  for (std::size_t i = 0; i < partition.intervals.size(); ++i) {
    const Interval& iv = partition.intervals[i];
    const std::size_t n = iv.count();
    if (n < min_events) {
      ++report.skipped.too_few_events;
      continue;
    }
    IntervalRecord rec;
    rec.interval = i;
    rec.start = iv.start;
    rec.n = n;
    double sum_s = 0.0, sum_w = 0.0;
    for (std::size_t t = iv.begin; t < iv.end_index; ++t) {
      sum_s += signs[t];
      sum_w += sizes[t];
      rec.R += d.return_at(t);
    }
    const double nd = static_cast<double>(n);
    rec.mu_s = sum_s / nd;
    rec.mu_w = sum_w / nd;
    double ss_s = 0.0, ss_w = 0.0;
    for (std::size_t t = iv.begin; t < iv.end_index; ++t) {
      ss_s += (signs[t] - rec.mu_s) * (signs[t] - rec.mu_s);
      ss_w += (sizes[t] - rec.mu_w) * (sizes[t] - rec.mu_w);
    }
    rec.sigma2_s = ss_s / (nd - 1.0);
    rec.sigma2_w = ss_w / (nd - 1.0);

    const KernelSums ks = kernels(n);
    if (ks.truncated) ++report.truncated_kernel_intervals;
    const auto v = predicted_variance({rec.mu_s, rec.sigma2_s, rec.mu_w, rec.sigma2_w}, n, ks);
    if (v.breakdown) {
      ++report.skipped.nonpositive_V_hat;
      continue;
    }
    rec.V_hat = v.value;
    rec.rho = rho(rec.R, rec.V_hat);
    report.per_interval.push_back(rec);
  }
  return report;
}

std::vector<RhoBin> bin_by_expected_volatility(std::span<const IntervalRecord> intervals,
                                               std::size_t num_bins) {
  if (num_bins == 0) throw ValidationError("number of bins must be positive");
  if (intervals.size() < num_bins)
    throw ValidationError("too few intervals (" + std::to_string(intervals.size()) + ") for " +
                          std::to_string(num_bins) + " bins");
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return intervals[a].V_hat < intervals[b].V_hat;
  });

  std::vector<RhoBin> bins(num_bins);
  const std::size_t m = intervals.size();
  for (std::size_t b = 0; b < num_bins; ++b) {
    const std::size_t lo = b * m / num_bins;
    const std::size_t hi = (b + 1) * m / num_bins;
    RhoBin& bin = bins[b];
    bin.count = hi - lo;
    double sum_v = 0.0, sum_r = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum_v += intervals[order[i]].V_hat;
      sum_r += intervals[order[i]].rho;
    }
    const double c = static_cast<double>(bin.count);
    bin.mean_V_hat = sum_v / c;
    bin.mean_rho = sum_r / c;
    if (bin.count >= 2) {
      double ss = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double e = intervals[order[i]].rho - bin.mean_rho;
        ss += e * e;
      }
      const double se = std::sqrt(ss / (c - 1.0) / c);
      if (se > 0.0) bin.standard_error = se;
    }
  }
  return bins;
}

WeightedMean weighted_mean_rho(std::span<const RhoBin> bins) {
  if (bins.size() == 1 && bins.front().standard_error)
    return {bins.front().mean_rho, *bins.front().standard_error};
  double sum_w = 0.0, sum_wx = 0.0;
  for (const auto& b : bins) {
    if (!b.standard_error) continue;
    const double w = 1.0 / (*b.standard_error * *b.standard_error);
    sum_w += w;
    sum_wx += w * b.mean_rho;
  }
  if (!(sum_w > 0.0)) throw ValidationError("weighted mean needs bins with defined standard errors");
  return {sum_wx / sum_w, 1.0 / std::sqrt(sum_w)};
}

WeightedMean raw_mean_rho(std::span<const IntervalRecord> intervals) {
  std::vector<double> r;
  r.reserve(intervals.size());
  for (const auto& rec : intervals) r.push_back(rec.rho);
  const Moments m = sample_moments(r);
  return {m.mean, std::sqrt(m.variance / static_cast<double>(r.size()))};
}

RhoReport run_model(const ReturnDecomposition& d, const IntervalPartition& partition,
                    const ModelOptions& options) {
  const auto kernels = global_kernel_provider(d, options.max_lag);
  RhoReport report = analyze_intervals(d, partition, kernels, {options.min_events});
  report.bins = bin_by_expected_volatility(report.per_interval, options.bins);
  report.weighted_mean_rho = weighted_mean_rho(report.bins);
  if (report.per_interval.size() >= 2) report.raw_mean_rho = raw_mean_rho(report.per_interval);
  return report;
}

}  // namespace grwalk
