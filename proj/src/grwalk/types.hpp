#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace grwalk {

/// Input that violates a documented contract (bad data, bad arguments).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while computing (numerical breakdown, I/O trouble mid-run).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Nanoseconds = std::chrono::nanoseconds;
using Timestamp = std::chrono::sys_time<Nanoseconds>;
using TradingDay = std::chrono::sys_days;

[[nodiscard]] inline TradingDay day_of(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t);
}

struct TickRecord {
  Timestamp timestamp;
  double best_bid = 0.0;
  double best_ask = 0.0;
};

struct MidpriceEvent {
  Timestamp timestamp;
  double midprice = 0.0;
  TradingDay day;
};

struct MidpriceSeries {
  std::vector<MidpriceEvent> events;
};

/// Unchecked column storage for a sign/size decomposition. Use
/// validate_decomposition() to turn it into a ReturnDecomposition.
struct DecompositionColumns {
  std::vector<std::int8_t> signs;
  std::vector<double> sizes;
  std::vector<Timestamp> timestamps;
  std::vector<TradingDay> days;
};

/// Non-zero returns split as r_t = sign_t * size_t, in event time.
/// Immutable once built; every instance satisfies the column invariants.
class ReturnDecomposition {
 public:
  ReturnDecomposition() = default;

  [[nodiscard]] std::size_t size() const noexcept { return cols_.sizes.size(); }
  [[nodiscard]] bool empty() const noexcept { return cols_.sizes.empty(); }

  [[nodiscard]] std::span<const std::int8_t> signs() const noexcept { return cols_.signs; }
  [[nodiscard]] std::span<const double> sizes() const noexcept { return cols_.sizes; }
  [[nodiscard]] std::span<const Timestamp> timestamps() const noexcept {
    return cols_.timestamps;
  }
  [[nodiscard]] std::span<const TradingDay> days() const noexcept { return cols_.days; }

  [[nodiscard]] double return_at(std::size_t t) const {
    return static_cast<double>(cols_.signs[t]) * cols_.sizes[t];
  }
  [[nodiscard]] std::vector<double> returns() const;
  [[nodiscard]] std::vector<double> signs_as_real() const;

  [[nodiscard]] const DecompositionColumns& columns() const noexcept { return cols_; }

  /// Same time grid, new values. The caller guarantees that signs/sizes are
  /// permutations (or other valid rearrangements) of valid values.
  [[nodiscard]] ReturnDecomposition with_values(std::vector<std::int8_t> signs,
                                                std::vector<double> sizes) const;

 private:
  friend ReturnDecomposition validate_decomposition(DecompositionColumns cols);
  explicit ReturnDecomposition(DecompositionColumns cols) : cols_(std::move(cols)) {}

  DecompositionColumns cols_;
};

/// Checks every column invariant and reports the first violation with its index.
[[nodiscard]] ReturnDecomposition validate_decomposition(DecompositionColumns cols);

/// Splits non-zero returns into signs and sizes (zero returns are rejected).
[[nodiscard]] ReturnDecomposition decompose_returns(std::span<const double> returns,
                                                    std::vector<Timestamp> timestamps,
                                                    std::vector<TradingDay> days);

struct Interval {
  Timestamp start;
  Timestamp end;
  std::size_t begin = 0;  // first event index
  std::size_t end_index = 0;  // one past the last event index

  [[nodiscard]] std::size_t count() const noexcept { return end_index - begin; }
};

struct IntervalPartition {
  Nanoseconds interval_length{0};
  std::vector<Interval> intervals;
};

struct IntervalRecord {
  std::size_t interval = 0;
  Timestamp start;
  std::size_t n = 0;
  double mu_s = 0.0;
  double sigma2_s = 0.0;
  double mu_w = 0.0;
  double sigma2_w = 0.0;
  double R = 0.0;
  double V_hat = 0.0;
  double rho = 0.0;
};

/// Autocorrelation c(1..max_lag); c(0) = 1 is implicit.
struct AcfTable {
  std::size_t max_lag = 0;
  std::vector<double> values;
  std::size_t n_obs = 0;

  [[nodiscard]] double at(std::size_t lag) const {
    if (lag == 0) return 1.0;
    if (lag > max_lag) throw ValidationError("lag exceeds AcfTable max_lag");
    return values[lag - 1];
  }
};

}  // namespace grwalk
