// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Reference values come from independent oracles
// written here, not from the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grwalk/estimators.hpp"
#include "grwalk/model.hpp"
#include "grwalk/parallel.hpp"
#include "grwalk/resampling.hpp"
#include "grwalk/synthetic.hpp"

namespace fs = std::filesystem;
using namespace grwalk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- kernel-sum identity ------------------------------------------------------

Outcome kernel_sum_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pick_n(1, 200);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  double worst = 0.0;
  const std::size_t cases = 1000;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = pick_n(rng);
    std::vector<double> f(n);
    for (auto& v : f) v = value(rng);
    // Brute force over all pairs i < j.
    double brute = 0.0, scale = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        brute += f[j - i - 1];
        scale += std::abs(f[j - i - 1]);
      }
    const std::vector<double> zero(n, 0.0);
    const double folded = static_cast<double>(n) * kernel_sums(f, zero, n).K_s;
    const double err = std::abs(folded - brute) / std::max(scale, 1e-300);
    worst = std::max(worst, scale == 0.0 ? std::abs(folded) : err);
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 5.0,
          fmt("%zu cases, max relative error %.3g, %.2f s", cases, worst, t)};
}

// --- variance oracle ------------------------------------------------------------

// Exact Var(R_n) for the uncoupled processes used below, summed pair by pair
// from the true covariance of r_t = s_t w_t:
//   Cov(r_i, r_j) = E[s_i s_j] E[w_i w_j] - mu_s^2 mu_w^2.
double exact_variance(const ProcessSpec& spec, std::size_t n) {
  double mu_s = 0.0, es_lag1 = 0.0;
  std::function<double(std::size_t)> ess;  // E[s_i s_{i+l}] for l >= 1
  if (spec.signs.kind == SignModel::Kind::Iid) {
    mu_s = 2.0 * spec.signs.p - 1.0;
    ess = [mu_s](std::size_t) { return mu_s * mu_s; };
  } else {
    const double r = 2.0 * spec.signs.persistence - 1.0;
    ess = [r](std::size_t l) { return std::pow(r, static_cast<double>(l)); };
  }
  (void)es_lag1;
  double mu_w = 0.0, ew2 = 0.0;
  std::function<double(std::size_t)> eww;  // E[w_i w_{i+l}] for l >= 1
  const auto& z = spec.sizes;
  if (z.kind == SizeModel::Kind::Constant) {
    mu_w = z.w;
    ew2 = z.w * z.w;
    eww = [w = z.w](std::size_t) { return w * w; };
  } else {
    const double s2 = z.sigma_log * z.sigma_log;
    mu_w = std::exp(z.mu_log + 0.5 * s2);
    ew2 = std::exp(2.0 * z.mu_log + 2.0 * s2);
    if (z.kind == SizeModel::Kind::IidLognormal) {
      eww = [mu_w](std::size_t) { return mu_w * mu_w; };
    } else {
      const double H = z.H;
      eww = [=](std::size_t l) {
        const double L = static_cast<double>(l);
        const double g = 0.5 * (std::pow(L + 1, 2 * H) - 2 * std::pow(L, 2 * H) +
                                std::pow(L - 1, 2 * H));
        // E[exp(a X + a Y)] for standard normals with correlation g.
        return std::exp(2.0 * z.mu_log + s2 * (1.0 + g));
      };
    }
  }
  const double mean_r = mu_s * mu_w;
  double var = static_cast<double>(n) * (ew2 - mean_r * mean_r);
  for (std::size_t l = 1; l < n; ++l)
    var += 2.0 * static_cast<double>(n - l) * (ess(l) * eww(l) - mean_r * mean_r);
  return var;
}

Outcome variance_oracle(unsigned threads) {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    ProcessSpec spec;
  };
  std::vector<Case> cases(3);
  cases[0].name = "iid signs / iid lognormal sizes";
  cases[0].spec.signs = {SignModel::Kind::Iid, 0.6, 0.5, std::nullopt};
  cases[0].spec.sizes = {SizeModel::Kind::IidLognormal, 1.0, 0.0, 0.5, 0.5};
  cases[1].name = "markov(0.75) signs / constant sizes";
  cases[1].spec.signs = {SignModel::Kind::Markov, 0.5, 0.75, std::nullopt};
  cases[1].spec.sizes = {SizeModel::Kind::Constant, 1.0, 0.0, 0.0, 0.5};
  cases[2].name = "iid signs / long-memory sizes H=0.7";
  cases[2].spec.signs = {SignModel::Kind::Iid, 0.6, 0.5, std::nullopt};
  cases[2].spec.sizes = {SizeModel::Kind::LognormalLongMemory, 1.0, 0.0, 0.5, 0.7};

  const std::vector<std::size_t> ns = {1, 10, 100};
  bool ok = true;
  double worst_z = 0.0, worst_exact = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    auto& spec = cases[c].spec;
    spec.length = 100;
    const auto mc = monte_carlo_variance(spec, ns, 1'000'000, derive_seed(77, c), threads);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const double predicted = population_variance(spec, ns[k]);
      const double exact = exact_variance(spec, ns[k]);
      const double z = std::abs(mc[k].variance - predicted) / mc[k].standard_error;
      worst_z = std::max(worst_z, z);
      worst_exact = std::max(worst_exact, std::abs(predicted - exact) / exact);
      if (z > 3.0) ok = false;
    }
  }
  // The Markov case at n = 10 has a closed form.
  const double markov10 = population_variance(cases[1].spec, 10);
  const bool exact_ok = std::abs(markov10 - 26.00390625) < 1e-9;
  const bool formula_ok = worst_exact < 1e-10;
  const double t = seconds_since(t0);
  return {ok && exact_ok && formula_ok && t < 180.0,
          fmt("max |MC - predicted| = %.2f SE over 9 checks; markov V(10) = %.8f; "
              "max deviation from pairwise oracle %.2g; %.1f s",
              worst_z, markov10, worst_exact, t)};
}

// --- synthetic benchmark ------------------------------------------------------

Outcome synthetic_benchmark() {
  const auto t0 = Clock::now();
  // Reference sign series and one-hour activity profile from a synthetic
  // calendar of the same length as the original sample.
  ProcessSpec ref;
  ref.signs = {SignModel::Kind::Markov, 0.5, 0.55, std::nullopt};
  ref.calendar.trading_days = 675;
  ref.seed = 3;
  const auto reference = generate_decomposition(ref);
  const auto hourly = partition_intervals(reference, std::chrono::hours{1}, ref.calendar.session);
  std::vector<std::size_t> counts;
  for (const auto& iv : hourly.intervals) counts.push_back(iv.count());

  const SizeModel sizes{SizeModel::Kind::LognormalLongMemory, 1.0, -8.0, 1.0, 0.7};
  const auto report = run_size_benchmark(reference, sizes, counts, 11, ModelOptions{});
  const double rho = report.weighted_mean_rho->value;
  const double t = seconds_since(t0);
  return {rho >= 0.85 && rho <= 1.00 && t < 120.0,
          fmt("weighted mean rho = %.4f +- %.4f (raw %.4f), %zu intervals in %zu bins, %.1f s", rho,
              report.weighted_mean_rho->standard_error, report.raw_mean_rho->value,
              report.per_interval.size(), report.bins.size(), t)};
}

// --- estimator recovery -------------------------------------------------------

Outcome estimator_recovery() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  for (double H : {0.6, 0.7, 0.8}) {
    const auto x = generate_fgn(H, 300'000, derive_seed(1234, static_cast<std::uint64_t>(H * 10)));
    const double est = dfa_hurst(x).H;
    ok = ok && std::abs(est - H) <= 0.05;
    detail += fmt("DFA H=%.1f -> %.4f; ", H, est);
  }

  std::mt19937_64 rng(4321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pareto(100'000);
  for (auto& v : pareto) v = std::pow(1.0 - u(rng), -1.0 / 3.0);
  const double alpha = hill_tail_index(pareto, 5000).alpha;
  ok = ok && std::abs(alpha - 3.0) <= 0.13;
  detail += fmt("Hill alpha=3 -> %.4f; ", alpha);

  int adf_noise = 0, pp_noise = 0, adf_walk = 0, pp_walk = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 g(derive_seed(99, static_cast<std::uint64_t>(t)));
    std::normal_distribution<double> z;
    std::vector<double> noise(10'000), walk(10'000);
    double level = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
      noise[i] = z(g);
      level += noise[i];
      walk[i] = level;
    }
    adf_noise += adf_test(noise).p_value < 0.01;
    pp_noise += pp_test(noise).p_value < 0.01;
    adf_walk += adf_test(walk).p_value > 0.10;
    pp_walk += pp_test(walk).p_value > 0.10;
  }
  const int need = 95;
  ok = ok && adf_noise >= need && pp_noise >= need && adf_walk >= need && pp_walk >= need;
  detail += fmt("unit root rejected on noise ADF %d/100 PP %d/100; "
                "not rejected on random walk ADF %d/100 PP %d/100 (need %d); %.1f s",
                adf_noise, pp_noise, adf_walk, pp_walk, need, seconds_since(t0));
  return {ok, detail};
}

// --- shuffle invariants -------------------------------------------------------

template <class T>
std::vector<T> sorted(std::span<const T> v) {
  std::vector<T> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, double>> sorted_pairs(const ReturnDecomposition& d) {
  std::vector<std::pair<int, double>> p;
  for (std::size_t i = 0; i < d.size(); ++i) p.emplace_back(d.signs()[i], d.sizes()[i]);
  std::sort(p.begin(), p.end());
  return p;
}

bool same_values(const ReturnDecomposition& a, const ReturnDecomposition& b) {
  return std::ranges::equal(a.signs(), b.signs()) && std::ranges::equal(a.sizes(), b.sizes()) &&
         std::ranges::equal(a.timestamps(), b.timestamps());
}

Outcome shuffle_invariants() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(555);
  const ShuffleMode modes[] = {ShuffleMode::Signs, ShuffleMode::Sizes, ShuffleMode::Returns,
                               ShuffleMode::BlockJoint, ShuffleMode::BlockSeparate};
  std::size_t failures = 0;
  const std::size_t cases = 200;
  for (std::size_t c = 0; c < cases; ++c) {
    ProcessSpec spec;
    spec.length = std::uniform_int_distribution<std::size_t>(1, 3000)(rng);
    spec.signs = {SignModel::Kind::Markov, 0.5, std::uniform_real_distribution<double>(0.2, 0.9)(rng),
                  std::nullopt};
    spec.sizes = {SizeModel::Kind::IidLognormal, 1.0, -7.0, 0.8, 0.5};
    spec.calendar.events_per_hour = 200.0;
    spec.seed = rng();
    const auto d = generate_decomposition(spec);
    const auto mode = modes[c % 5];
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, d.size())(rng);
    const std::uint64_t seed = rng();
    const auto a = apply_shuffle(d, mode, L, seed);
    const auto b = apply_shuffle(d, mode, L, seed);

    bool ok = a.size() == d.size() && same_values(a, b);
    ok = ok && sorted(a.signs()) == sorted(d.signs()) && sorted(a.sizes()) == sorted(d.sizes());
    if (mode == ShuffleMode::Returns || mode == ShuffleMode::BlockJoint)
      ok = ok && sorted_pairs(a) == sorted_pairs(d);
    if (mode == ShuffleMode::Signs) ok = ok && std::ranges::equal(a.sizes(), d.sizes());
    if (mode == ShuffleMode::Sizes) ok = ok && std::ranges::equal(a.signs(), d.signs());
    ok = ok && std::ranges::equal(a.timestamps(), d.timestamps()) &&
         std::ranges::equal(a.days(), d.days());
    const auto pd = partition_intervals(d, std::chrono::minutes{30}, spec.calendar.session);
    const auto pa = partition_intervals(a, std::chrono::minutes{30}, spec.calendar.session);
    ok = ok && pd.intervals.size() == pa.intervals.size();
    for (std::size_t i = 0; ok && i < pd.intervals.size(); ++i)
      ok = pd.intervals[i].count() == pa.intervals[i].count();
    if (!ok) ++failures;
  }
  return {failures == 0,
          fmt("%zu randomized cases over 5 modes, %zu failures, %.1f s", cases, failures,
              seconds_since(t0))};
}

// --- dependence contrast ------------------------------------------------------

Outcome dependence_contrast(unsigned threads) {
  const auto t0 = Clock::now();
  ProcessSpec spec;
  spec.signs = {SignModel::Kind::Markov, 0.5, 0.75, std::nullopt};
  spec.sizes = {SizeModel::Kind::IidLognormal, 1.0, -8.0, 0.5, 0.5};
  spec.coupling = {1, 0.5};
  spec.length = 1'000'000;
  spec.seed = 11;
  const auto d = generate_coupled(spec);
  const auto part = partition_intervals(d, std::chrono::hours{1}, spec.calendar.session);
  const ModelOptions model;
  const double original = run_model(d, part, model).weighted_mean_rho->value;

  const std::size_t reps = 50;
  const double separate =
      run_experiment(d, part, {ShuffleMode::BlockSeparate, 60, 5, reps}, model, threads).mean_rho;
  std::vector<double> joint;
  for (std::size_t L : {1, 10, 60, 600})
    joint.push_back(
        run_experiment(d, part, {ShuffleMode::BlockJoint, L, 5, reps}, model, threads).mean_rho);

  const bool below = original < 0.9;
  const bool restored = separate >= 0.9 && separate <= 1.05;
  const bool joint_below = joint[2] < separate;
  const bool monotone = std::is_sorted(joint.rbegin(), joint.rend());
  const double t = seconds_since(t0);
  return {below && restored && joint_below && monotone && t < 600.0,
          fmt("original %.4f; separate L=60 %.4f; joint L=1,10,60,600: %.4f %.4f %.4f %.4f; %.1f s",
              original, separate, joint[0], joint[1], joint[2], joint[3], t)};
}

// --- pipeline determinism -----------------------------------------------------

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Runs the whole CLI pipeline into `dir`; returns false if any step fails.
bool pipeline(const fs::path& dir, unsigned threads) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = std::string(GRWALK_CLI) + " --threads " + std::to_string(threads) + " ";
  const std::string dec = (dir / "decomposition.csv").string();
  const std::string fixture = std::string(GRWALK_FIXTURE_DIR) + "/quotes.csv";
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  bool ok = run(cli + "ingest --input " + fixture + " --out " + dec) == 0;
  ok = ok && run(cli + "analyze --decomposition " + dec + " --bootstrap-replicates 20 --seed 3 --out " +
                 path("analysis.json")) == 0;
  std::string models, experiments;
  for (const char* T : {"15m", "1h", "4h"}) {
    const std::string out = path(std::string("model_") + T + ".json");
    ok = ok && run(cli + "model --decomposition " + dec + " --interval " + T + " --out " + out +
                   " --bins-out " + path(std::string("bins_") + T + ".csv")) == 0;
    models += " --model " + out;
  }
  for (const char* mode : {"signs", "sizes", "returns"}) {
    const std::string out = path(std::string("shuffle_") + mode + ".json");
    ok = ok && run(cli + "shuffle --decomposition " + dec + " --mode " + mode +
                   " --seed 42 --replicates 8 --out " + out) == 0;
    experiments += " --experiment " + out;
  }
  ok = ok && run(cli + "shuffle --decomposition " + dec +
                 " --mode block-separate --block-length 60 --seed 42 --replicates 8 --out " +
                 path("shuffle_block_separate.json")) == 0;
  ok = ok && run(cli + "shuffle --decomposition " + dec +
                 " --mode block-joint --block-length 1,10,60,600 --seed 42 --replicates 8 --out " +
                 path("shuffle_block_joint.json") + " --sweep-out " + path("sweep.csv")) == 0;
  experiments += " --experiment " + path("shuffle_block_separate.json") + " --experiment " +
                 path("shuffle_block_joint.json");
  ok = ok && run(cli + "report --analysis " + path("analysis.json") + models + experiments +
                 " --out-dir " + path("bundle")) == 0;
  return ok;
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      files.emplace_back(fs::relative(e.path(), dir).string(), slurp(e.path()));
  std::sort(files.begin(), files.end());
  return files;
}

Outcome pipeline_determinism() {
  const auto t0 = Clock::now();
  const fs::path base = fs::temp_directory_path() / "grwalk_acceptance";
  const bool ran = pipeline(base / "a", 1) && pipeline(base / "b", 1) && pipeline(base / "c", 8);
  if (!ran) return {false, "a pipeline step exited non-zero"};
  const auto a = tree(base / "a");
  const bool same_runs = a == tree(base / "b");
  const bool same_threads = a == tree(base / "c");
  fs::remove_all(base);
  return {same_runs && same_threads && a.size() >= 15,
          fmt("%zu output files; repeat run %s; threads 1 vs 8 %s; %.1f s", a.size(),
              same_runs ? "identical" : "DIFFERENT", same_threads ? "identical" : "DIFFERENT",
              seconds_since(t0))};
}

}  // namespace

int main() {
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  struct Check {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Check> checks = {
      {"kernel_sum_identity", kernel_sum_identity},
      {"variance_oracle", [&] { return variance_oracle(threads); }},
      {"synthetic_benchmark", synthetic_benchmark},
      {"estimator_recovery", estimator_recovery},
      {"shuffle_invariants", shuffle_invariants},
      {"dependence_contrast", [&] { return dependence_contrast(threads); }},
      {"pipeline_determinism", pipeline_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
