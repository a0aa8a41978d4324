#include "grwalk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <numeric>
#include <optional>

#include "grwalk/fft.hpp"
#include "grwalk/parallel.hpp"

namespace grwalk {
namespace {

using Rng = std::mt19937_64;

// Sub-stream tags so signs, sizes and times never share a generator.
constexpr std::uint64_t kSignStream = 0x5167'4e00;
constexpr std::uint64_t kSizeStream = 0x5123'e000;
constexpr std::uint64_t kTimeStream = 0x7143'e000;

constexpr std::size_t kMaxEmbeddingAttempts = 4;
constexpr std::size_t kMonteCarloChunk = 1024;

void fill_signs(const SignModel& model, Rng& rng, std::span<std::int8_t> out) {
  if (out.empty()) return;
  if (model.kind == SignModel::Kind::Iid) {
    std::bernoulli_distribution up(model.p);
    for (auto& s : out) s = up(rng) ? 1 : -1;
    return;
  }
  std::bernoulli_distribution stay(model.persistence);
  if (model.initial_sign) {
    out[0] = *model.initial_sign > 0 ? 1 : -1;
  } else {
    out[0] = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  }
  for (std::size_t t = 1; t < out.size(); ++t)
    out[t] = stay(rng) ? out[t - 1] : static_cast<std::int8_t>(-out[t - 1]);
}

void to_lognormal(const SizeModel& model, std::span<double> gaussian) {
  for (double& g : gaussian) g = std::exp(model.mu_log + model.sigma_log * g);
}

void fill_sizes(const SizeModel& model, Rng& rng, const FgnGenerator* fgn, std::span<double> out,
                std::span<double> spare) {
  switch (model.kind) {
    case SizeModel::Kind::Constant:
      std::fill(out.begin(), out.end(), model.w);
      return;
    case SizeModel::Kind::IidLognormal: {
      std::normal_distribution<double> z;
      for (double& v : out) v = z(rng);
      to_lognormal(model, out);
      return;
    }
    case SizeModel::Kind::LognormalLongMemory:
      fgn->generate(rng, out, spare);
      to_lognormal(model, out);
      return;
  }
}

}  // namespace

void ProcessSpec::validate() const {
  if (signs.kind == SignModel::Kind::Iid && !(signs.p >= 0.0 && signs.p <= 1.0))
    throw ValidationError("iid sign probability must lie in [0, 1]");
  if (signs.kind == SignModel::Kind::Markov && !(signs.persistence > 0.0 && signs.persistence <= 1.0))
    throw ValidationError("markov persistence must lie in (0, 1]");
  if (sizes.kind == SizeModel::Kind::Constant && !(sizes.w > 0.0))
    throw ValidationError("constant size must be positive");
  if (sizes.kind != SizeModel::Kind::Constant && !(sizes.sigma_log >= 0.0))
    throw ValidationError("sigma_log must be non-negative");
  if (sizes.kind == SizeModel::Kind::LognormalLongMemory && !(sizes.H > 0.0 && sizes.H < 1.0))
    throw ValidationError("Hurst exponent must lie in (0, 1)");
  if (coupling.lag > 0 && !(std::abs(coupling.beta) < 1.0))
    throw ValidationError("coupling strength must satisfy |beta| < 1 to keep sizes positive");
  if (!(calendar.events_per_hour > 0.0)) throw ValidationError("events_per_hour must be positive");
  if (!(calendar.rate_dispersion >= 0.0)) throw ValidationError("rate_dispersion must be >= 0");
  calendar.session.validate();
}

double fgn_autocovariance(double H, std::size_t lag) {
  const double l = static_cast<double>(lag);
  const double h2 = 2.0 * H;
  return 0.5 * (std::pow(l + 1.0, h2) - 2.0 * std::pow(l, h2) + std::pow(std::abs(l - 1.0), h2));
}

FgnGenerator::FgnGenerator(double H, std::size_t n) : H_(H), n_(n) {
  if (!(H > 0.0 && H < 1.0)) throw ValidationError("fGn: H must lie in (0, 1)");
  if (n == 0) throw ValidationError("fGn: length must be positive");
  std::size_t m = next_pow2(std::max<std::size_t>(n, 2));
  for (std::size_t attempt = 0; attempt < kMaxEmbeddingAttempts; ++attempt, m *= 2) {
    const std::size_t M = 2 * m;
    ComplexFft fft(M);
    auto buf = fft.buffer();
    for (std::size_t k = 0; k <= m; ++k) buf[k] = fgn_autocovariance(H, k);
    for (std::size_t k = m + 1; k < M; ++k) buf[k] = buf[M - k];
    fft.forward();
    double max_eig = 0.0, min_eig = 0.0;
    for (const auto& z : buf) {
      max_eig = std::max(max_eig, z.real());
      min_eig = std::min(min_eig, z.real());
    }
    if (min_eig < -1e-10 * max_eig) continue;
    sqrt_eigen_.resize(M);
    for (std::size_t k = 0; k < M; ++k)
      sqrt_eigen_[k] = std::sqrt(std::max(buf[k].real(), 0.0) / static_cast<double>(M));
    return;
  }
  throw RuntimeError("fGn: circulant embedding is not non-negative definite");
}

void FgnGenerator::generate(Rng& rng, std::span<double> first, std::span<double> second) const {
  const std::size_t M = sqrt_eigen_.size();
  // Plans are cheap with FFTW_ESTIMATE; one per call keeps generate() thread-safe.
  thread_local std::unique_ptr<ComplexFft> fft;
  if (!fft || fft->size() != M) fft = std::make_unique<ComplexFft>(M);
  auto buf = fft->buffer();
  std::normal_distribution<double> z;
  for (std::size_t k = 0; k < M; ++k) {
    const double a = z(rng);
    const double b = z(rng);
    buf[k] = {sqrt_eigen_[k] * a, sqrt_eigen_[k] * b};
  }
  fft->forward();
  const std::size_t n1 = std::min(first.size(), n_);
  for (std::size_t i = 0; i < n1; ++i) first[i] = buf[i].real();
  const std::size_t n2 = std::min(second.size(), n_);
  for (std::size_t i = 0; i < n2; ++i) second[i] = buf[i].imag();
  (void)H_;
}

std::vector<double> generate_fgn(double H, std::size_t n, std::uint64_t seed) {
  FgnGenerator gen(H, n);
  Rng rng(seed);
  std::vector<double> out(n);
  gen.generate(rng, out, {});
  return out;
}

std::vector<std::int8_t> generate_signs(const SignModel& model, std::size_t n, std::uint64_t seed) {
  std::vector<std::int8_t> out(n);
  Rng rng(seed);
  fill_signs(model, rng, out);
  return out;
}

std::vector<double> generate_sizes(const SizeModel& model, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  Rng rng(seed);
  std::optional<FgnGenerator> fgn;
  if (model.kind == SizeModel::Kind::LognormalLongMemory) fgn.emplace(model.H, n);
  fill_sizes(model, rng, fgn ? &*fgn : nullptr, out, {});
  return out;
}

void apply_coupling(const Coupling& coupling, std::span<const std::int8_t> signs,
                    std::span<double> sizes) {
  if (!coupling.enabled()) return;
  if (!(std::abs(coupling.beta) < 1.0))
    throw ValidationError("coupling strength must satisfy |beta| < 1 to keep sizes positive");
  for (std::size_t t = coupling.lag; t < sizes.size(); ++t)
    sizes[t] *= 1.0 - coupling.beta * signs[t - coupling.lag] * signs[t];
}

EventTimes generate_event_times(const Calendar& calendar, std::size_t n, std::uint64_t seed) {
  Calendar fixed_length = calendar;
  fixed_length.trading_days = 0;
  return generate_calendar_times(fixed_length, n, seed);
}

EventTimes generate_calendar_times(const Calendar& calendar, std::size_t n, std::uint64_t seed) {
  using namespace std::chrono;
  calendar.session.validate();
  Rng rng(seed);
  EventTimes out;
  out.timestamps.reserve(n);
  out.days.reserve(n);
  const auto window = calendar.session.window_end() - calendar.session.window_start();
  const double hours = duration<double, std::ratio<3600>>(window).count();
  const double sigma = calendar.rate_dispersion;
  std::normal_distribution<double> z;
  std::uniform_int_distribution<std::int64_t> offset(0, window.count() - 1);
  TradingDay day = calendar.first_day;
  std::vector<std::int64_t> offsets;
  const bool by_days = calendar.trading_days > 0;
  if (by_days) n = std::numeric_limits<std::size_t>::max();
  std::size_t days_done = 0;
  while (by_days ? days_done < calendar.trading_days : out.timestamps.size() < n) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) {
      const double rate =
          calendar.events_per_hour * std::exp(sigma * z(rng) - 0.5 * sigma * sigma) * hours;
      const std::size_t count = std::poisson_distribution<std::size_t>(rate)(rng);
      offsets.resize(count);
      for (auto& o : offsets) o = offset(rng);
      std::sort(offsets.begin(), offsets.end());
      const Timestamp open = Timestamp{day.time_since_epoch()} + calendar.session.window_start();
      for (std::size_t i = 0; i < count && out.timestamps.size() < n; ++i) {
        out.timestamps.push_back(open + Nanoseconds{offsets[i]});
        out.days.push_back(day);
      }
      ++days_done;
    }
    day += days{1};
  }
  return out;
}

ReturnDecomposition generate_decomposition(const ProcessSpec& spec) {
  spec.validate();
  auto times =
      generate_calendar_times(spec.calendar, spec.length, derive_seed(spec.seed, kTimeStream));
  const std::size_t n = times.timestamps.size();
  if (n == 0) throw ValidationError("synthetic series is empty");
  DecompositionColumns cols;
  cols.signs = generate_signs(spec.signs, n, derive_seed(spec.seed, kSignStream));
  cols.sizes = generate_sizes(spec.sizes, n, derive_seed(spec.seed, kSizeStream));
  apply_coupling(spec.coupling, cols.signs, cols.sizes);
  cols.timestamps = std::move(times.timestamps);
  cols.days = std::move(times.days);
  return validate_decomposition(std::move(cols));
}

ReturnDecomposition generate_coupled(const ProcessSpec& spec) {
  if (!spec.coupling.enabled()) throw ValidationError("generate_coupled needs lag >= 1 and beta != 0");
  return generate_decomposition(spec);
}

PopulationParameters population_parameters(const ProcessSpec& spec, std::size_t max_lag) {
  spec.validate();
  if (spec.coupling.enabled())
    throw ValidationError("population parameters have no closed form for coupled processes");
  PopulationParameters p;
  p.sign_acf.assign(max_lag, 0.0);
  p.size_acf.assign(max_lag, 0.0);

  if (spec.signs.kind == SignModel::Kind::Iid) {
    p.moments.mu_s = 2.0 * spec.signs.p - 1.0;
    p.moments.sigma2_s = 1.0 - p.moments.mu_s * p.moments.mu_s;
  } else {
    if (spec.signs.initial_sign && spec.signs.persistence < 1.0)
      throw ValidationError("population parameters need a stationary Markov start");
    if (spec.signs.initial_sign) {
      // Deterministic path: every step equals the initial sign.
      p.moments.mu_s = *spec.signs.initial_sign > 0 ? 1.0 : -1.0;
      p.moments.sigma2_s = 0.0;
    } else {
      p.moments.mu_s = 0.0;
      p.moments.sigma2_s = 1.0;
      const double r = 2.0 * spec.signs.persistence - 1.0;
      double c = 1.0;
      for (auto& v : p.sign_acf) v = (c *= r);
    }
  }

  const auto& s = spec.sizes;
  switch (s.kind) {
    case SizeModel::Kind::Constant:
      p.moments.mu_w = s.w;
      p.moments.sigma2_w = 0.0;
      break;
    case SizeModel::Kind::IidLognormal:
    case SizeModel::Kind::LognormalLongMemory: {
      const double v = s.sigma_log * s.sigma_log;
      p.moments.mu_w = std::exp(s.mu_log + 0.5 * v);
      p.moments.sigma2_w = std::exp(2.0 * s.mu_log + v) * std::expm1(v);
      if (s.kind == SizeModel::Kind::LognormalLongMemory && v > 0.0) {
        for (std::size_t l = 1; l <= max_lag; ++l)
          p.size_acf[l - 1] = std::expm1(v * fgn_autocovariance(s.H, l)) / std::expm1(v);
      }
      break;
    }
  }
  return p;
}

double population_variance(const ProcessSpec& spec, std::size_t n) {
  const auto p = population_parameters(spec, n);
  return predicted_variance(p.moments, n, kernel_sums(p.sign_acf, p.size_acf, n)).value;
}

std::vector<VarianceEstimate> monte_carlo_variance(const ProcessSpec& spec,
                                                   std::span<const std::size_t> ns,
                                                   std::size_t replicates, std::uint64_t seed,
                                                   unsigned threads) {
  spec.validate();
  if (ns.empty()) throw ValidationError("monte_carlo_variance: no step counts given");
  if (replicates < 2) throw ValidationError("monte_carlo_variance: need at least two replicates");
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  if (n_max == 0) throw ValidationError("monte_carlo_variance: n must be positive");

  std::optional<FgnGenerator> fgn;
  if (spec.sizes.kind == SizeModel::Kind::LognormalLongMemory) fgn.emplace(spec.sizes.H, n_max);

  // sums[k * replicates + r] = R_{ns[k]} of replicate r
  std::vector<double> sums(ns.size() * replicates);
  const std::size_t chunks = (replicates + kMonteCarloChunk - 1) / kMonteCarloChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    std::vector<std::int8_t> signs(n_max);
    std::vector<double> sizes(n_max), spare(n_max);
    bool have_spare = false;
    const std::size_t r0 = c * kMonteCarloChunk;
    const std::size_t r1 = std::min(replicates, r0 + kMonteCarloChunk);
    for (std::size_t r = r0; r < r1; ++r) {
      fill_signs(spec.signs, rng, signs);
      if (fgn && have_spare) {
        std::copy(spare.begin(), spare.end(), sizes.begin());
        to_lognormal(spec.sizes, sizes);
        have_spare = false;
      } else {
        fill_sizes(spec.sizes, rng, fgn ? &*fgn : nullptr, sizes, spare);
        have_spare = fgn.has_value();
      }
      apply_coupling(spec.coupling, signs, sizes);
      double acc = 0.0;
      std::size_t t = 0;
      for (std::size_t k = 0; k < ns.size(); ++k) {
        // ns need not be sorted; restart the prefix when it goes backwards
        if (ns[k] < t) {
          acc = 0.0;
          t = 0;
        }
        for (; t < ns[k]; ++t) acc += signs[t] * sizes[t];
        sums[k * replicates + r] = acc;
      }
    }
  });

  std::vector<VarianceEstimate> out;
  const double R = static_cast<double>(replicates);
  for (std::size_t k = 0; k < ns.size(); ++k) {
    std::span<const double> x(&sums[k * replicates], replicates);
    const Moments m = sample_moments(x);
    double m4 = 0.0;
    for (double v : x) {
      const double e = (v - m.mean) * (v - m.mean);
      m4 += e * e;
    }
    m4 /= R;
    VarianceEstimate est;
    est.n = ns[k];
    est.mean = m.mean;
    est.variance = m.variance;
    est.standard_error = std::sqrt(std::max(m4 - m.variance * m.variance, 0.0) / R);
    est.replicates = replicates;
    out.push_back(est);
  }
  return out;
}

RhoReport run_size_benchmark(const ReturnDecomposition& reference, const SizeModel& sizes,
                         std::span<const std::size_t> counts, std::uint64_t seed,
                         const ModelOptions& options) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total > reference.size())
    throw ValidationError("benchmark: interval counts sum past the end of the sign series");
  auto generated = generate_sizes(sizes, reference.size(), derive_seed(seed, kSizeStream));
  const auto hybrid =
      reference.with_values({reference.signs().begin(), reference.signs().end()}, std::move(generated));
  const auto partition = partition_by_counts(hybrid, counts);
  return run_model(hybrid, partition, options);
}

}  // namespace grwalk
