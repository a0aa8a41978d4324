#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "grwalk/ingestion.hpp"
#include "grwalk/model.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

struct SignModel {
  enum class Kind { Iid, Markov };
  Kind kind = Kind::Iid;
  double p = 0.5;            // iid: P(+1)
  double persistence = 0.5;  // markov: P(s_t = s_{t-1})
  std::optional<int> initial_sign;  // markov: fixed s_0 instead of the stationary draw
};

struct SizeModel {
  enum class Kind { Constant, IidLognormal, LognormalLongMemory };
  Kind kind = Kind::Constant;
  double w = 1.0;  // constant
  double mu_log = 0.0;
  double sigma_log = 0.0;
  double H = 0.5;  // long memory
};

/// w_t <- w_t (1 - beta s_{t-lag} s_t) for t >= lag; lag 0 disables coupling.
/// Positive beta makes reversals larger than continuations, which the
/// independence model over-predicts (rho < 1).
struct Coupling {
  std::size_t lag = 0;
  double beta = 0.0;
  [[nodiscard]] bool enabled() const noexcept { return lag > 0 && beta != 0.0; }
};

/// Event-time placement for generated series: trading days (weekends skipped),
/// a per-day Poisson arrival rate with lognormal day-to-day dispersion, and
/// arrivals uniform inside the trimmed session window.
struct Calendar {
  TradingDay first_day = std::chrono::sys_days{std::chrono::year{2000} / 5 / 2};
  double events_per_hour = 60.0;
  double rate_dispersion = 0.3;
  /// When positive, exactly this many trading days are generated and the
  /// series length follows from the arrivals.
  std::size_t trading_days = 0;
  SessionConfig session;
};

struct ProcessSpec {
  SignModel signs;
  SizeModel sizes;
  Coupling coupling;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  Calendar calendar;

  void validate() const;
};

/// fGn autocovariance 0.5 (|l+1|^{2H} - 2|l|^{2H} + |l-1|^{2H}).
[[nodiscard]] double fgn_autocovariance(double H, std::size_t lag);

/// Exact fractional Gaussian noise by circulant embedding (Davies-Harte).
/// Each FFT yields two independent paths (real and imaginary parts).
class FgnGenerator {
 public:
  FgnGenerator(double H, std::size_t n);
  [[nodiscard]] std::size_t length() const noexcept { return n_; }
  [[nodiscard]] std::size_t embedding_size() const noexcept { return sqrt_eigen_.size(); }
  void generate(std::mt19937_64& rng, std::span<double> first, std::span<double> second) const;

 private:
  double H_;
  std::size_t n_;
  std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / M)
};

[[nodiscard]] std::vector<double> generate_fgn(double H, std::size_t n, std::uint64_t seed);
[[nodiscard]] std::vector<std::int8_t> generate_signs(const SignModel& model, std::size_t n,
                                                      std::uint64_t seed);
[[nodiscard]] std::vector<double> generate_sizes(const SizeModel& model, std::size_t n,
                                                 std::uint64_t seed);
void apply_coupling(const Coupling& coupling, std::span<const std::int8_t> signs,
                    std::span<double> sizes);

struct EventTimes {
  std::vector<Timestamp> timestamps;
  std::vector<TradingDay> days;
};
[[nodiscard]] EventTimes generate_event_times(const Calendar& calendar, std::size_t n,
                                              std::uint64_t seed);

/// Arrival times for `n` events, or for calendar.trading_days days when set.
[[nodiscard]] EventTimes generate_calendar_times(const Calendar& calendar, std::size_t n,
                                                 std::uint64_t seed);

/// Full synthetic series: signs, sizes (with coupling), and event times.
[[nodiscard]] ReturnDecomposition generate_decomposition(const ProcessSpec& spec);
/// Same as generate_decomposition; requires an enabled coupling.
[[nodiscard]] ReturnDecomposition generate_coupled(const ProcessSpec& spec);

/// True moments and autocorrelations of an uncoupled process.
struct PopulationParameters {
  StepMoments moments;
  std::vector<double> sign_acf;  // c_s(1..max_lag)
  std::vector<double> size_acf;  // c_w(1..max_lag)
};
[[nodiscard]] PopulationParameters population_parameters(const ProcessSpec& spec,
                                                         std::size_t max_lag);
/// predicted_variance() evaluated with the true parameters.
[[nodiscard]] double population_variance(const ProcessSpec& spec, std::size_t n);

struct VarianceEstimate {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  std::size_t replicates = 0;
};

/// Brute-force Var(R_n): independent replicate paths of the process, R_n as the
/// prefix sum for each requested n. Deterministic for a given seed regardless
/// of thread count.
[[nodiscard]] std::vector<VarianceEstimate> monte_carlo_variance(const ProcessSpec& spec,
                                                                 std::span<const std::size_t> ns,
                                                                 std::size_t replicates,
                                                                 std::uint64_t seed,
                                                                 unsigned threads = 1);

/// Keeps the reference signs and time grid, replaces sizes with a fresh draw
/// from `sizes`, and runs the rho pipeline on event-count intervals.
[[nodiscard]] RhoReport run_size_benchmark(const ReturnDecomposition& reference,
                                       const SizeModel& sizes,
                                       std::span<const std::size_t> counts, std::uint64_t seed,
                                       const ModelOptions& options);

}  // namespace grwalk
