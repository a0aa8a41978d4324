#include "grwalk/grwalk.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "grwalk/analysis.hpp"
#include "grwalk/ingestion.hpp"
#include "grwalk/model.hpp"
#include "grwalk/persistence.hpp"
#include "grwalk/reports.hpp"
#include "grwalk/resampling.hpp"
#include "grwalk/synthetic.hpp"
#include "grwalk/timeutil.hpp"

struct grw_decomposition {
  grwalk::ReturnDecomposition data;
  std::optional<grwalk::SessionConfig> session;
};

namespace {

using grwalk::Json;
using grwalk::json_value;

thread_local std::string last_error;

template <class F>
grw_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return GRW_OK;
  } catch (const grwalk::ValidationError& e) {
    last_error = e.what();
    return GRW_ERROR_VALIDATION;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("invalid options: ") + e.what();
    return GRW_ERROR_VALIDATION;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GRW_ERROR_RUNTIME;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GRW_ERROR_RUNTIME;
  } catch (...) {
    last_error = "unknown error";
    return GRW_ERROR_RUNTIME;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw grwalk::ValidationError(std::string(what) + " must not be NULL");
}

Json parse_options(const char* text, const char* where) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw grwalk::ValidationError(std::string(where) + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw grwalk::ValidationError(std::string(where) + ": expected an object");
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

grwalk::SessionConfig session_from(const Json& j, grwalk::SessionConfig s) {
  if (j.contains("session_open"))
    s.session_open = grwalk::parse_time_of_day(json_value<std::string>(j, "session_open", ""));
  if (j.contains("session_close"))
    s.session_close = grwalk::parse_time_of_day(json_value<std::string>(j, "session_close", ""));
  if (j.contains("trim_open"))
    s.trim_open = grwalk::parse_duration(json_value<std::string>(j, "trim_open", ""));
  if (j.contains("trim_close"))
    s.trim_close = grwalk::parse_duration(json_value<std::string>(j, "trim_close", ""));
  s.validate();
  return s;
}

grwalk::ModelOptions model_options(const Json& j) {
  grwalk::ModelOptions m;
  m.bins = json_value<std::size_t>(j, "bins", m.bins);
  m.max_lag = json_value<std::size_t>(j, "max_lag", m.max_lag);
  m.min_events = json_value<std::size_t>(j, "min_events", m.min_events);
  if (m.bins == 0) throw grwalk::ValidationError("bins must be positive");
  if (m.max_lag == 0) throw grwalk::ValidationError("max_lag must be positive");
  return m;
}

grwalk::IntervalPartition partition_from(const grw_decomposition* d, const Json& j) {
  const auto session = session_from(j, d->session.value_or(grwalk::SessionConfig{}));
  const auto T = grwalk::parse_duration(json_value<std::string>(j, "interval", "1h"));
  return grwalk::partition_intervals(d->data, T, session);
}

unsigned threads_from(const Json& j) {
  const auto t = json_value<unsigned>(j, "threads", 1);
  if (t == 0) throw grwalk::ValidationError("threads must be at least 1");
  return t;
}

std::uint64_t required_seed(const Json& j) {
  if (!j.contains("seed")) throw grwalk::ValidationError("a seed is required");
  return json_value<std::uint64_t>(j, "seed", 0);
}

const std::vector<std::string_view> kSessionKeys = {"session_open", "session_close", "trim_open",
                                                   "trim_close"};

}  // namespace

extern "C" {

const char* grw_last_error(void) { return last_error.c_str(); }

const char* grw_version(void) { return "0.1.0"; }

void grw_string_free(char* s) { std::free(s); }

grw_status grw_ingest(const char* path, const char* options_json, grw_decomposition** out,
                      char** stats_json) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const Json j = parse_options(options_json, "ingest options");
    grwalk::check_json_keys(j, "ingest options",
                            {"schema", "delimiter", "max_malformed_fraction", "session_open",
                             "session_close", "trim_open", "trim_close"});
    grwalk::TickParseOptions parse;
    const auto schema = json_value<std::string>(j, "schema", "bid-ask");
    if (schema == "bid-ask" || schema == "bid_ask") parse.schema = grwalk::QuoteSchema::BidAsk;
    else if (schema == "midprice") parse.schema = grwalk::QuoteSchema::Midprice;
    else throw grwalk::ValidationError("unknown schema '" + schema + "' (expected bid-ask or midprice)");
    const auto delim = json_value<std::string>(j, "delimiter", ",");
    if (delim.size() != 1) throw grwalk::ValidationError("delimiter must be one character");
    parse.delimiter = delim[0];
    parse.max_malformed_fraction =
        json_value(j, "max_malformed_fraction", parse.max_malformed_fraction);
    const auto session = session_from(j, {});

    std::ifstream in(path);
    if (!in) throw grwalk::ValidationError(std::string("cannot open input file ") + path);
    auto result = grwalk::ingest(in, parse, session);
    if (stats_json) {
      const auto& s = result.stats;
      *stats_json = dup_string(dump({{"rows", s.rows},
                                     {"malformed", s.malformed},
                                     {"crossed", s.crossed},
                                     {"ticks", s.ticks},
                                     {"in_session", s.in_session},
                                     {"returns", s.returns},
                                     {"trading_days", s.trading_days}}));
    }
    *out = new grw_decomposition{std::move(result.decomposition), session};
  });
}

grw_status grw_decomposition_read(const char* path, grw_decomposition** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto file = grwalk::read_decomposition_file(path);
    *out = new grw_decomposition{std::move(file.decomposition), file.session};
  });
}

grw_status grw_decomposition_write(const grw_decomposition* d, const char* path) {
  return guarded([&] {
    require(d, "decomposition");
    require(path, "path");
    grwalk::write_decomposition_file(path, d->data, d->session);
  });
}

grw_status grw_decomposition_create(const int8_t* signs, const double* sizes,
                                    const int64_t* timestamps_ns, const int32_t* days, size_t n,
                                    grw_decomposition** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(signs, "signs");
      require(sizes, "sizes");
      require(timestamps_ns, "timestamps");
      require(days, "days");
    }
    grwalk::DecompositionColumns cols;
    cols.signs.assign(signs, signs + n);
    cols.sizes.assign(sizes, sizes + n);
    for (size_t i = 0; i < n; ++i) {
      cols.timestamps.emplace_back(grwalk::Nanoseconds{timestamps_ns[i]});
      cols.days.emplace_back(std::chrono::days{days[i]});
    }
    *out = new grw_decomposition{grwalk::validate_decomposition(std::move(cols)), std::nullopt};
  });
}

size_t grw_decomposition_size(const grw_decomposition* d) { return d ? d->data.size() : 0; }

grw_status grw_decomposition_get(const grw_decomposition* d, size_t index, int8_t* sign,
                                 double* size, int64_t* timestamp_ns) {
  return guarded([&] {
    require(d, "decomposition");
    if (index >= d->data.size())
      throw grwalk::ValidationError("index " + std::to_string(index) + " out of range");
    if (sign) *sign = d->data.signs()[index];
    if (size) *size = d->data.sizes()[index];
    if (timestamp_ns) *timestamp_ns = d->data.timestamps()[index].time_since_epoch().count();
  });
}

void grw_decomposition_free(grw_decomposition* d) { delete d; }

grw_status grw_analyze(const grw_decomposition* d, const char* options_json, char** report_json) {
  return guarded([&] {
    require(d, "decomposition");
    require(report_json, "report_json");
    const Json j = parse_options(options_json, "analyze options");
    grwalk::check_json_keys(j, "analyze options",
                            {"max_lag", "hill_k", "dfa_order", "dfa_windows", "dfa_min_window",
                             "deterministic", "adf_lags", "cross_lag", "day_min_events", "level",
                             "bootstrap", "threads"});
    grwalk::AnalysisOptions o;
    o.max_lag = json_value<std::size_t>(j, "max_lag", o.max_lag);
    if (o.max_lag == 0) throw grwalk::ValidationError("max_lag must be positive");
    if (j.contains("hill_k") && !(j["hill_k"].is_string() && j["hill_k"] == "auto"))
      o.hill_k = json_value<std::size_t>(j, "hill_k", 0);
    o.dfa.detrend_order = json_value(j, "dfa_order", o.dfa.detrend_order);
    o.dfa.num_windows = json_value<std::size_t>(j, "dfa_windows", o.dfa.num_windows);
    o.dfa.min_window = json_value<std::size_t>(j, "dfa_min_window", o.dfa.min_window);
    o.deterministic =
        grwalk::parse_deterministic(json_value<std::string>(j, "deterministic", "constant"));
    if (j.contains("adf_lags") && !(j["adf_lags"].is_string() && j["adf_lags"] == "schwert"))
      o.adf_lags = json_value<std::size_t>(j, "adf_lags", 0);
    o.cross_lag = json_value<long>(j, "cross_lag", o.cross_lag);
    o.day_min_events = json_value<std::size_t>(j, "day_min_events", o.day_min_events);
    o.level = json_value(j, "level", o.level);
    if (j.contains("bootstrap") && !j["bootstrap"].is_null()) {
      const auto& b = j["bootstrap"];
      grwalk::check_json_keys(b, "bootstrap", {"block_length", "replicates", "seed"});
      grwalk::BootstrapOptions bo;
      bo.block_length = json_value<std::size_t>(b, "block_length", bo.block_length);
      bo.replicates = json_value<std::size_t>(b, "replicates", bo.replicates);
      bo.seed = required_seed(b);
      o.bootstrap = bo;
    }
    o.threads = threads_from(j);
    *report_json = dup_string(dump(grwalk::to_json(grwalk::run_analysis(d->data, o))));
  });
}

grw_status grw_model(const grw_decomposition* d, const char* options_json, char** report_json,
                     char** bins_csv) {
  return guarded([&] {
    require(d, "decomposition");
    require(report_json, "report_json");
    const Json j = parse_options(options_json, "model options");
    std::vector<std::string_view> keys = {"interval", "bins", "max_lag", "min_events",
                                          "with_intervals"};
    keys.insert(keys.end(), kSessionKeys.begin(), kSessionKeys.end());
    for (const auto& [key, _] : j.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw grwalk::ValidationError("model options: unknown key '" + key + "'");
    const auto partition = partition_from(d, j);
    const auto report = grwalk::run_model(d->data, partition, model_options(j));
    auto doc = grwalk::to_json(report, json_value(j, "with_intervals", false));
    std::string csv = grwalk::bins_csv(report.bins);
    *report_json = dup_string(dump(doc));
    if (bins_csv) *bins_csv = dup_string(csv);
  });
}

grw_status grw_shuffle(const grw_decomposition* d, const char* options_json, char** report_json,
                       char** sweep_csv) {
  return guarded([&] {
    require(d, "decomposition");
    require(report_json, "report_json");
    const Json j = parse_options(options_json, "shuffle options");
    std::vector<std::string_view> keys = {"mode",       "block_lengths", "interval", "seed",
                                          "replicates", "bins",          "max_lag",  "min_events",
                                          "threads"};
    keys.insert(keys.end(), kSessionKeys.begin(), kSessionKeys.end());
    for (const auto& [key, _] : j.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw grwalk::ValidationError("shuffle options: unknown key '" + key + "'");

    grwalk::ShuffleSpec base;
    base.mode = grwalk::parse_shuffle_mode(json_value<std::string>(j, "mode", "returns"));
    base.seed = required_seed(j);
    base.replicates = json_value<std::size_t>(j, "replicates", base.replicates);
    auto lengths = json_value<std::vector<std::size_t>>(j, "block_lengths", {});
    if (lengths.empty()) lengths.push_back(1);
    if (!grwalk::is_block_mode(base.mode) && lengths.size() > 1)
      throw grwalk::ValidationError("a block-length sweep needs a block mode");

    const auto partition = partition_from(d, j);
    const auto model = model_options(j);
    const unsigned threads = threads_from(j);
    std::vector<grwalk::ExperimentReport> runs;
    for (std::size_t L : lengths) {
      auto spec = base;
      spec.block_length = L;
      runs.push_back(grwalk::run_experiment(d->data, partition, spec, model, threads));
    }
    std::string csv = grwalk::rho_vs_block_length_csv(runs);
    *report_json = dup_string(dump(grwalk::to_json(runs)));
    if (sweep_csv) *sweep_csv = dup_string(csv);
  });
}

grw_status grw_synth(const char* spec_json, uint64_t seed, grw_decomposition** out) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out, "out");
    auto spec = grwalk::process_spec_from_json(parse_options(spec_json, "process spec"));
    spec.seed = seed;
    auto d = grwalk::generate_decomposition(spec);
    *out = new grw_decomposition{std::move(d), spec.calendar.session};
  });
}

grw_status grw_oracle(const char* spec_json, const char* options_json, char** report_json) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(report_json, "report_json");
    auto spec = grwalk::process_spec_from_json(parse_options(spec_json, "process spec"));
    const Json j = parse_options(options_json, "oracle options");
    grwalk::check_json_keys(j, "oracle options", {"n", "replicates", "seed", "threads"});
    const auto seed = required_seed(j);
    std::vector<std::size_t> ns;
    if (j.contains("n") && j["n"].is_array()) ns = json_value<std::vector<std::size_t>>(j, "n", {});
    else ns.push_back(json_value<std::size_t>(j, "n", 10));
    const auto replicates = json_value<std::size_t>(j, "replicates", 100000);
    if (replicates < 1000) throw grwalk::ValidationError("oracle needs at least 1000 replicates");
    for (auto n : ns)
      if (n == 0) throw grwalk::ValidationError("n must be positive");
    spec.seed = seed;

    const auto estimates =
        grwalk::monte_carlo_variance(spec, ns, replicates, seed, threads_from(j));
    std::vector<grwalk::OracleRow> rows;
    for (const auto& e : estimates) {
      grwalk::OracleRow row{e, std::nullopt};
      if (!spec.coupling.enabled()) row.predicted = grwalk::population_variance(spec, e.n);
      rows.push_back(row);
    }
    *report_json = dup_string(dump(grwalk::oracle_to_json(spec, seed, rows)));
  });
}

grw_status grw_report(const char* inputs_json, char** report_json) {
  return guarded([&] {
    require(inputs_json, "inputs_json");
    const Json j = parse_options(inputs_json, "report inputs");
    grwalk::check_json_keys(j, "report inputs", {"analysis", "models", "experiments", "out_dir"});
    if (!j.contains("analysis")) throw grwalk::ValidationError("report needs an analysis input");
    if (!j.contains("out_dir")) throw grwalk::ValidationError("report needs an output directory");
    grwalk::ReportInputs inputs;
    inputs.analysis = json_value<std::string>(j, "analysis", "");
    for (const auto& p : json_value<std::vector<std::string>>(j, "models", {}))
      inputs.models.emplace_back(p);
    for (const auto& p : json_value<std::vector<std::string>>(j, "experiments", {}))
      inputs.experiments.emplace_back(p);
    const auto doc =
        grwalk::build_report(inputs, json_value<std::string>(j, "out_dir", ""));
    if (report_json) *report_json = dup_string(dump(doc));
  });
}

grw_status grw_predicted_variance(double mu_s, double sigma2_s, double mu_w, double sigma2_w,
                                  size_t n, double k_s, double k_w, double k_sw, double* out) {
  return guarded([&] {
    require(out, "out");
    grwalk::KernelSums ks;
    ks.K_s = k_s;
    ks.K_w = k_w;
    ks.K_sw = k_sw;
    ks.n = n;
    const auto v = grwalk::predicted_variance({mu_s, sigma2_s, mu_w, sigma2_w}, n, ks);
    *out = v.value;
  });
}

grw_status grw_rho(double interval_return, double predicted_variance, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = grwalk::rho(interval_return, predicted_variance);
  });
}

}  // extern "C"
