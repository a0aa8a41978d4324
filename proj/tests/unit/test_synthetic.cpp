#include <catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <vector>

#include "grwalk/estimators.hpp"
#include "grwalk/model.hpp"
#include "grwalk/parallel.hpp"
#include "grwalk/synthetic.hpp"

using namespace grwalk;
using namespace std::chrono_literals;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double gamma_oracle(double H, double l) {
  return 0.5 * (std::pow(l + 1, 2 * H) - 2 * std::pow(l, 2 * H) + std::pow(std::abs(l - 1), 2 * H));
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("fGn autocovariance") {
  CHECK(fgn_autocovariance(0.8, 0) == 1.0);
  CHECK_THAT(fgn_autocovariance(0.8, 1), WithinAbs(0.5 * (std::pow(2.0, 1.6) - 2.0), 1e-15));
  CHECK_THAT(fgn_autocovariance(0.8, 1), WithinAbs(0.5157, 1e-4));
  CHECK(fgn_autocovariance(0.5, 3) == 0.0);
}

TEST_CASE("fGn with H = 0.5 is white noise") {
  const std::size_t n = 1 << 16;
  const auto x = generate_fgn(0.5, n, 1);
  const auto acf = autocorrelation(x, 50);
  for (double c : acf.values) CHECK(std::abs(c) < 4.0 / std::sqrt(double(n)));
  CHECK_THAT(sample_moments(x).variance, WithinAbs(1.0, 0.03));
}

TEST_CASE("fGn lag-1 correlation") {
  const auto x = generate_fgn(0.8, 1 << 18, 2);
  CHECK_THAT(autocorrelation(x, 1).at(1), WithinAbs(0.5157, 0.01));
}

TEST_CASE("fGn autocovariance matches the closed form across replicates") {
  const std::size_t n = 1 << 16, reps = 64, lags = 10;
  for (double H : {0.3, 0.7, 0.9}) {
    std::vector<std::vector<double>> est(lags + 1);
    FgnGenerator gen(H, n);
    std::mt19937_64 rng(derive_seed(5, static_cast<std::uint64_t>(H * 10)));
    std::vector<double> a(n), b(n);
    for (std::size_t r = 0; r < reps / 2; ++r) {
      gen.generate(rng, a, b);
      for (const auto* x : {&a, &b})
        for (std::size_t l = 1; l <= lags; ++l) {
          double s = 0.0;
          for (std::size_t t = 0; t + l < n; ++t) s += (*x)[t] * (*x)[t + l];
          est[l].push_back(s / double(n - l));  // zero mean is known
        }
    }
    for (std::size_t l = 1; l <= lags; ++l) {
      const auto m = sample_moments(est[l]);
      const double se = std::sqrt(m.variance / double(reps));
      CHECK(std::abs(m.mean - gamma_oracle(H, double(l))) < 4.0 * se);
    }
  }
}

TEST_CASE("fGn is deterministic and validated") {
  CHECK(generate_fgn(0.7, 1000, 3) == generate_fgn(0.7, 1000, 3));
  CHECK(generate_fgn(0.7, 1000, 3) != generate_fgn(0.7, 1000, 4));
  CHECK(generate_fgn(0.7, 1, 3).size() == 1);
  CHECK_THROWS_AS(generate_fgn(1.0, 100, 3), ValidationError);
  CHECK_THROWS_AS(generate_fgn(0.0, 100, 3), ValidationError);
}

TEST_CASE("sizes") {
  const auto flat = generate_sizes({SizeModel::Kind::IidLognormal, 1.0, -3.0, 0.0, 0.5}, 100, 1);
  for (double w : flat) CHECK(w == std::exp(-3.0));
  const auto c = generate_sizes({SizeModel::Kind::Constant, 0.25, 0.0, 0.0, 0.5}, 10, 1);
  CHECK(std::ranges::all_of(c, [](double w) { return w == 0.25; }));

  const std::size_t n = 300'000;
  const auto lm = generate_sizes({SizeModel::Kind::LognormalLongMemory, 1.0, 0.0, 0.5, 0.7}, n, 2);
  const double H = dfa_hurst(lm).H;
  CHECK(H >= 0.65);
  CHECK(H <= 0.75);

  const auto iid = generate_sizes({SizeModel::Kind::IidLognormal, 1.0, 0.0, 0.5, 0.5}, n, 3);
  const double expected = std::exp(0.125);
  const double sd = std::sqrt((std::exp(0.25) - 1.0) * std::exp(0.25));
  CHECK(std::abs(mean_of(iid) - expected) < 4.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("signs") {
  const std::size_t n = 1'000'000;
  const auto s = generate_signs({SignModel::Kind::Iid, 0.5, 0.5, std::nullopt}, n, 4);
  double sum = 0.0;
  for (auto v : s) sum += v;
  CHECK(std::abs(sum / double(n)) < 3.0 / std::sqrt(double(n)));

  const auto m = generate_signs({SignModel::Kind::Markov, 0.5, 0.75, std::nullopt}, 200'000, 5);
  std::vector<double> mr(m.begin(), m.end());
  CHECK_THAT(autocorrelation(mr, 1).at(1), WithinAbs(0.5, 0.01));

  const auto fixed = generate_signs({SignModel::Kind::Markov, 0.5, 1.0, 1}, 50, 6);
  CHECK(std::ranges::all_of(fixed, [](auto v) { return v == 1; }));
}

TEST_CASE("spec validation") {
  ProcessSpec ok;
  ok.length = 10;
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.signs.p = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ok;
  bad.coupling = {1, 1.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ok;
  bad.sizes = {SizeModel::Kind::LognormalLongMemory, 1.0, 0.0, 0.5, 1.2};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ok;
  bad.calendar.events_per_hour = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("calendar") {
  Calendar cal;
  cal.first_day = std::chrono::sys_days{std::chrono::year{2024} / 1 / 5};  // a Friday
  cal.trading_days = 7;
  const auto times = generate_calendar_times(cal, 0, 8);
  std::set<TradingDay> days(times.days.begin(), times.days.end());
  CHECK(days.size() == 7);
  for (const auto& d : days) {
    const std::chrono::weekday wd{d};
    CHECK(wd != std::chrono::Saturday);
    CHECK(wd != std::chrono::Sunday);
  }
  CHECK(std::is_sorted(times.timestamps.begin(), times.timestamps.end()));
  for (std::size_t i = 0; i < times.timestamps.size(); ++i) {
    const auto tod = times.timestamps[i] - Timestamp{times.days[i].time_since_epoch()};
    CHECK(tod >= cal.session.window_start());
    CHECK(tod < cal.session.window_end());
  }
  // Rate 60/h over the default 8 hour window.
  CHECK_THAT(double(times.timestamps.size()) / 7.0, WithinRel(480.0, 0.35));

  const auto fixed = generate_event_times(cal, 1234, 9);
  CHECK(fixed.timestamps.size() == 1234);
}

TEST_CASE("generated decompositions") {
  ProcessSpec spec;
  spec.length = 5000;
  spec.seed = 10;
  const auto a = generate_decomposition(spec);
  const auto b = generate_decomposition(spec);
  CHECK(a.size() == 5000);
  CHECK(std::ranges::equal(a.sizes(), b.sizes()));
  CHECK(std::ranges::equal(a.timestamps(), b.timestamps()));
  CHECK_THROWS_AS(generate_coupled(spec), ValidationError);
}

TEST_CASE("coupling") {
  const std::vector<std::int8_t> s = {1, 1, -1, -1};
  std::vector<double> w(4, 1.0);
  apply_coupling({1, 0.5}, s, w);
  CHECK(w == std::vector<double>{1.0, 0.5, 1.5, 0.5});

  ProcessSpec spec;
  spec.signs = {SignModel::Kind::Markov, 0.5, 0.75, std::nullopt};
  spec.sizes = {SizeModel::Kind::IidLognormal, 1.0, -8.0, 0.5, 0.5};
  spec.calendar.trading_days = 200;
  spec.seed = 11;
  const auto d = generate_decomposition(spec);  // beta = 0
  const auto p = partition_intervals(d, 1h, spec.calendar.session);
  const double r = run_model(d, p, {}).weighted_mean_rho->value;
  CHECK(r >= 0.95);
  CHECK(r <= 1.05);
}

TEST_CASE("population parameters") {
  ProcessSpec spec;
  spec.signs = {SignModel::Kind::Iid, 0.6, 0.5, std::nullopt};
  spec.sizes = {SizeModel::Kind::LognormalLongMemory, 1.0, 0.2, 0.5, 0.7};
  const auto p = population_parameters(spec, 5);
  CHECK_THAT(p.moments.mu_s, WithinAbs(0.2, 1e-15));
  CHECK_THAT(p.moments.sigma2_s, WithinAbs(0.96, 1e-15));
  CHECK_THAT(p.moments.mu_w, WithinRel(std::exp(0.2 + 0.125), 1e-14));
  CHECK_THAT(p.moments.sigma2_w, WithinRel((std::exp(0.25) - 1.0) * std::exp(0.4 + 0.25), 1e-13));
  for (std::size_t l = 1; l <= 5; ++l) {
    CHECK(p.sign_acf[l - 1] == 0.0);
    CHECK_THAT(p.size_acf[l - 1],
               WithinRel(std::expm1(0.25 * gamma_oracle(0.7, double(l))) / std::expm1(0.25), 1e-12));
  }
  spec.coupling = {1, 0.3};
  CHECK_THROWS_AS(population_parameters(spec, 5), ValidationError);
}

TEST_CASE("Monte Carlo variance") {
  ProcessSpec walk;
  walk.length = 100;
  const std::vector<std::size_t> ns = {100};
  const auto v = monte_carlo_variance(walk, ns, 100'000, 12, 2);
  CHECK(std::abs(v[0].variance - 100.0) < 3.0 * v[0].standard_error);
  CHECK(v[0].replicates == 100'000);
  const auto v4 = monte_carlo_variance(walk, ns, 100'000, 12, 4);
  CHECK(v4[0].variance == v[0].variance);

  ProcessSpec fixed;
  fixed.signs = {SignModel::Kind::Markov, 0.5, 1.0, 1};
  fixed.length = 20;
  const std::vector<std::size_t> n20 = {20};
  CHECK(monte_carlo_variance(fixed, n20, 2000, 1)[0].variance == 0.0);
  CHECK(population_variance(fixed, 20) == 0.0);
}

TEST_CASE("benchmark harness") {
  ProcessSpec ref;
  ref.calendar.trading_days = 150;
  ref.seed = 13;
  const auto reference = generate_decomposition(ref);
  const auto hourly = partition_intervals(reference, 1h, ref.calendar.session);
  std::vector<std::size_t> counts;
  for (const auto& iv : hourly.intervals) counts.push_back(iv.count());

  const auto iid = run_size_benchmark(reference, {SizeModel::Kind::IidLognormal, 1.0, -8.0, 0.5, 0.5},
                                  counts, 14, {});
  CHECK_THAT(iid.weighted_mean_rho->value, WithinAbs(1.0, 0.05));
  const auto flat = run_size_benchmark(
      reference, {SizeModel::Kind::LognormalLongMemory, 1.0, -8.0, 1e-6, 0.7}, counts, 14, {});
  CHECK_THAT(flat.weighted_mean_rho->value, WithinAbs(1.0, 0.05));

  counts.push_back(reference.size());
  CHECK_THROWS_AS(run_size_benchmark(reference, {}, counts, 14, {}), ValidationError);
}
