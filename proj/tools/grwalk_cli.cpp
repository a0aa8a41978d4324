// grwalk: command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grwalk/grwalk.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum class Level { Error, Warn, Info, Debug };
Level log_level = Level::Warn;

void log(Level level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level) std::cerr << "grwalk [" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

// Carries a C API status out of a subcommand.
struct Failure {
  grw_status status;
  std::string message;
};

void check(grw_status s) {
  if (s != GRW_OK) throw Failure{s, grw_last_error()};
}

struct DecompositionDeleter {
  void operator()(grw_decomposition* d) const { grw_decomposition_free(d); }
};
using Decomposition = std::unique_ptr<grw_decomposition, DecompositionDeleter>;

struct CString {
  char* p = nullptr;
  ~CString() { grw_string_free(p); }
  [[nodiscard]] std::string str() const { return p ? p : ""; }
};

Decomposition read_decomposition(const std::string& path) {
  grw_decomposition* d = nullptr;
  check(grw_decomposition_read(path.c_str(), &d));
  return Decomposition(d);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{GRW_ERROR_RUNTIME, "cannot open " + path.string() + " for writing"};
  out << text;
  if (!out) throw Failure{GRW_ERROR_RUNTIME, "write to " + path.string() + " failed"};
  log(Level::Info, "wrote " + path.string());
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{GRW_ERROR_VALIDATION, "missing input file " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path sibling(const std::string& out, const std::string& name) {
  return fs::path(out).parent_path() / name;
}

// Splits "1,10,60" style lists; CLI11 delimiters already split, but a single
// quoted argument may still carry commas.
std::vector<std::size_t> flatten_lengths(const std::vector<std::string>& raw) {
  std::vector<std::size_t> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size() || tok[0] == '-')
        throw Failure{GRW_ERROR_VALIDATION, "bad block length '" + tok + "'"};
      out.push_back(static_cast<std::size_t>(v));
    }
  }
  return out;
}

/// JSON configuration: top-level keys are global flags, nested objects hold
/// subcommand flags, e.g. {"threads": 4, "model": {"interval": "1h"}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const Json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static Json dump(const CLI::App* app, bool default_also) {
    Json j = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      const auto results = opt->reduced_results();
      if (!results.empty()) j[name] = results.size() == 1 ? Json(results[0]) : Json(results);
      else if (default_also && !opt->get_default_str().empty()) j[name] = opt->get_default_str();
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      Json s = dump(sub, default_also);
      if (!s.empty()) j[sub->get_name()] = std::move(s);
    }
    return j;
  }
};

struct Globals {
  unsigned threads = 1;
  std::string log_level = "warn";
};

struct IngestArgs {
  std::string input, out, schema = "bid-ask", delimiter = ",";
  std::string session_open = "08:00", session_close = "16:30", trim_open = "15m", trim_close = "15m";
  double max_malformed = 0.05;
};

struct SessionArgs {
  std::optional<std::string> session_open, session_close, trim_open, trim_close;
  void add(CLI::App* cmd) {
    cmd->add_option("--session-open", session_open, "Session open HH:MM (default: stored)");
    cmd->add_option("--session-close", session_close, "Session close HH:MM (default: stored)");
    cmd->add_option("--trim-open", trim_open, "Trim after the open (default: stored)");
    cmd->add_option("--trim-close", trim_close, "Trim before the close (default: stored)");
  }
  void fill(Json& j) const {
    if (session_open) j["session_open"] = *session_open;
    if (session_close) j["session_close"] = *session_close;
    if (trim_open) j["trim_open"] = *trim_open;
    if (trim_close) j["trim_close"] = *trim_close;
  }
};

struct AnalyzeArgs {
  std::string decomposition, out, hill_k = "auto", deterministic = "constant", adf_lags = "schwert";
  std::size_t max_lag = 1000, dfa_windows = 20, dfa_min_window = 10, day_min_events = 20;
  int dfa_order = 1;
  long cross_lag = 10;
  double level = 0.05;
  std::size_t bootstrap_replicates = 0, bootstrap_block = 100;
  std::optional<std::uint64_t> seed;
};

struct ModelArgs {
  std::string decomposition, out, interval = "1h", bins_out;
  std::size_t bins = 10, max_lag = 1000, min_events = 2;
  bool with_intervals = false;
  SessionArgs session;
};

struct ShuffleArgs {
  std::string decomposition, out, mode, interval = "1h", sweep_out;
  std::vector<std::string> block_lengths{"60"};
  std::uint64_t seed = 0;
  std::size_t replicates = 20, bins = 10, max_lag = 1000, min_events = 2;
  SessionArgs session;
};

struct SynthArgs {
  std::string spec, out;
  std::uint64_t seed = 0;
};

struct OracleArgs {
  std::string spec, out;
  std::vector<std::size_t> n{10};
  std::size_t replicates = 1000000;
  std::uint64_t seed = 0;
};

struct ReportArgs {
  std::string analysis, out_dir;
  std::vector<std::string> models, experiments;
};

void run_ingest(const IngestArgs& a) {
  const Json opts = {{"schema", a.schema},
                     {"delimiter", a.delimiter},
                     {"max_malformed_fraction", a.max_malformed},
                     {"session_open", a.session_open},
                     {"session_close", a.session_close},
                     {"trim_open", a.trim_open},
                     {"trim_close", a.trim_close}};
  grw_decomposition* raw = nullptr;
  CString stats;
  check(grw_ingest(a.input.c_str(), opts.dump().c_str(), &raw, &stats.p));
  Decomposition d(raw);
  check(grw_decomposition_write(d.get(), a.out.c_str()));
  log(Level::Info, "ingest stats: " + Json::parse(stats.str()).dump());
}

void run_analyze(const AnalyzeArgs& a, const Globals& g) {
  Json opts = {{"max_lag", a.max_lag},
               {"dfa_order", a.dfa_order},
               {"dfa_windows", a.dfa_windows},
               {"dfa_min_window", a.dfa_min_window},
               {"deterministic", a.deterministic},
               {"cross_lag", a.cross_lag},
               {"day_min_events", a.day_min_events},
               {"level", a.level},
               {"threads", g.threads}};
  opts["hill_k"] = a.hill_k == "auto" ? Json("auto") : Json(std::stoull(a.hill_k));
  opts["adf_lags"] = a.adf_lags == "schwert" ? Json("schwert") : Json(std::stoull(a.adf_lags));
  if (a.bootstrap_replicates > 0) {
    if (!a.seed) throw Failure{GRW_ERROR_VALIDATION, "--bootstrap-replicates needs --seed"};
    opts["bootstrap"] = {{"block_length", a.bootstrap_block},
                         {"replicates", a.bootstrap_replicates},
                         {"seed", *a.seed}};
  }
  auto d = read_decomposition(a.decomposition);
  CString report;
  check(grw_analyze(d.get(), opts.dump().c_str(), &report.p));
  emit(a.out, report.str());
}

void run_model(const ModelArgs& a) {
  Json opts = {{"interval", a.interval},
               {"bins", a.bins},
               {"max_lag", a.max_lag},
               {"min_events", a.min_events},
               {"with_intervals", a.with_intervals}};
  a.session.fill(opts);
  auto d = read_decomposition(a.decomposition);
  CString report, bins;
  check(grw_model(d.get(), opts.dump().c_str(), &report.p, &bins.p));
  emit(a.out, report.str());
  const auto bins_path = a.bins_out.empty() ? sibling(a.out, "rho_bins.csv") : fs::path(a.bins_out);
  write_file(bins_path, bins.str());
}

void run_shuffle(const ShuffleArgs& a, const Globals& g) {
  Json opts = {{"mode", a.mode},
               {"block_lengths", flatten_lengths(a.block_lengths)},
               {"interval", a.interval},
               {"seed", a.seed},
               {"replicates", a.replicates},
               {"bins", a.bins},
               {"max_lag", a.max_lag},
               {"min_events", a.min_events},
               {"threads", g.threads}};
  a.session.fill(opts);
  const bool block = a.mode == "block-joint" || a.mode == "block-separate" ||
                     a.mode == "block_joint" || a.mode == "block_separate";
  if (!block) opts.erase("block_lengths");
  auto d = read_decomposition(a.decomposition);
  CString report, sweep;
  check(grw_shuffle(d.get(), opts.dump().c_str(), &report.p, &sweep.p));
  emit(a.out, report.str());
  if (block && opts["block_lengths"].size() > 1) {
    const auto path = a.sweep_out.empty() ? sibling(a.out, "rho_vs_L.csv") : fs::path(a.sweep_out);
    write_file(path, sweep.str());
  }
}

void run_synth(const SynthArgs& a) {
  const auto spec = read_file(a.spec);
  grw_decomposition* raw = nullptr;
  check(grw_synth(spec.c_str(), a.seed, &raw));
  Decomposition d(raw);
  check(grw_decomposition_write(d.get(), a.out.c_str()));
  log(Level::Info, "generated " + std::to_string(grw_decomposition_size(d.get())) + " events");
}

void run_oracle(const OracleArgs& a, const Globals& g) {
  const auto spec = read_file(a.spec);
  const Json opts = {{"n", a.n}, {"replicates", a.replicates}, {"seed", a.seed}, {"threads", g.threads}};
  CString report;
  check(grw_oracle(spec.c_str(), opts.dump().c_str(), &report.p));
  emit(a.out, report.str());
}

void run_report(const ReportArgs& a) {
  const Json inputs = {{"analysis", a.analysis},
                       {"models", a.models},
                       {"experiments", a.experiments},
                       {"out_dir", a.out_dir}};
  CString report;
  check(grw_report(inputs.dump().c_str(), &report.p));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grwalk: generalized random walk volatility toolkit"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags");

  Globals g;
  app.add_option("--threads", g.threads, "Worker thread cap")->check(CLI::Range(1u, 1024u));
  app.add_option("--log-level", g.log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Quote file to sign/size decomposition");
  ingest->add_option("--input", ia.input, "Quote CSV")->required();
  ingest->add_option("--schema", ia.schema, "bid-ask|midprice")
      ->check(CLI::IsMember({"bid-ask", "midprice"}));
  ingest->add_option("--delimiter", ia.delimiter, "Field delimiter");
  ingest->add_option("--session-open", ia.session_open, "Session open HH:MM");
  ingest->add_option("--session-close", ia.session_close, "Session close HH:MM");
  ingest->add_option("--trim-open", ia.trim_open, "Discarded time after the open");
  ingest->add_option("--trim-close", ia.trim_close, "Discarded time before the close");
  ingest->add_option("--max-malformed", ia.max_malformed, "Tolerated malformed-row fraction");
  ingest->add_option("--out", ia.out, "Decomposition file")->required();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Estimator report for a decomposition");
  analyze->add_option("--decomposition", aa.decomposition)->required();
  analyze->add_option("--max-lag", aa.max_lag, "Autocorrelation horizon");
  analyze->add_option("--hill-k", aa.hill_k, "Upper order statistics for Hill, or auto");
  analyze->add_option("--dfa-order", aa.dfa_order, "DFA detrending order");
  analyze->add_option("--dfa-windows", aa.dfa_windows, "Number of DFA window sizes");
  analyze->add_option("--dfa-min-window", aa.dfa_min_window, "Smallest DFA window");
  analyze->add_option("--deterministic", aa.deterministic, "Unit-root regression terms")
      ->check(CLI::IsMember({"none", "constant", "trend"}));
  analyze->add_option("--adf-lags", aa.adf_lags, "ADF lag order, or schwert");
  analyze->add_option("--cross-lag", aa.cross_lag, "Cross-correlation lag range");
  analyze->add_option("--day-min-events", aa.day_min_events, "Minimum events per tested day");
  analyze->add_option("--level", aa.level, "Per-day test level");
  analyze->add_option("--bootstrap-replicates", aa.bootstrap_replicates,
                      "Block-bootstrap replicates for alpha and H (0: off)");
  analyze->add_option("--bootstrap-block", aa.bootstrap_block, "Bootstrap block length");
  analyze->add_option("--seed", aa.seed, "Bootstrap seed");
  analyze->add_option("--out", aa.out, "Report JSON (default: stdout)");

  ModelArgs ma;
  auto* model = app.add_subcommand("model", "Predicted volatility and rho per interval");
  model->add_option("--decomposition", ma.decomposition)->required();
  model->add_option("--interval", ma.interval, "Interval length, e.g. 15m, 1h, 4h");
  model->add_option("--bins", ma.bins, "Quantile bins");
  model->add_option("--max-lag", ma.max_lag, "Autocorrelation horizon");
  model->add_option("--min-events", ma.min_events, "Minimum events per interval");
  model->add_flag("--with-intervals", ma.with_intervals, "Include per-interval records");
  model->add_option("--bins-out", ma.bins_out, "Bins CSV (default: rho_bins.csv beside --out)");
  ma.session.add(model);
  model->add_option("--out", ma.out, "Report JSON")->required();

  ShuffleArgs sa;
  auto* shuffle = app.add_subcommand("shuffle", "Shuffling experiments");
  shuffle->add_option("--decomposition", sa.decomposition)->required();
  shuffle->add_option("--mode", sa.mode, "signs|sizes|returns|block-joint|block-separate")
      ->required()
      ->check(CLI::IsMember({"signs", "sizes", "returns", "block-joint", "block-separate"}));
  shuffle->add_option("--block-length", sa.block_lengths, "Block length or comma list (sweep)")
      ->delimiter(',');
  shuffle->add_option("--interval", sa.interval, "Interval length");
  shuffle->add_option("--seed", sa.seed, "Base seed")->required();
  shuffle->add_option("--replicates", sa.replicates, "Replicates per block length");
  shuffle->add_option("--bins", sa.bins, "Quantile bins");
  shuffle->add_option("--max-lag", sa.max_lag, "Autocorrelation horizon");
  shuffle->add_option("--min-events", sa.min_events, "Minimum events per interval");
  shuffle->add_option("--sweep-out", sa.sweep_out, "Sweep CSV (default: rho_vs_L.csv beside --out)");
  sa.session.add(shuffle);
  shuffle->add_option("--out", sa.out, "Experiment JSON")->required();

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic decomposition");
  synth->add_option("--spec", ya.spec, "Process spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", ya.seed, "Seed")->required();
  synth->add_option("--out", ya.out, "Decomposition file")->required();

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo variance against the prediction");
  oracle->add_option("--spec", oa.spec, "Process spec JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--n", oa.n, "Step counts")->delimiter(',');
  oracle->add_option("--replicates", oa.replicates, "Monte Carlo replicates");
  oracle->add_option("--seed", oa.seed, "Seed")->required();
  oracle->add_option("--out", oa.out, "Report JSON (default: stdout)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Consolidated tables from earlier outputs");
  report->add_option("--analysis", ra.analysis, "analyze output")->required();
  report->add_option("--model", ra.models, "model outputs");
  report->add_option("--experiment", ra.experiments, "shuffle outputs");
  report->add_option("--out-dir", ra.out_dir, "Bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : GRW_ERROR_VALIDATION;
  }

  if (g.log_level == "error") log_level = Level::Error;
  else if (g.log_level == "info") log_level = Level::Info;
  else if (g.log_level == "debug") log_level = Level::Debug;

  try {
    if (*ingest) run_ingest(ia);
    else if (*analyze) run_analyze(aa, g);
    else if (*model) run_model(ma);
    else if (*shuffle) run_shuffle(sa, g);
    else if (*synth) run_synth(ya);
    else if (*oracle) run_oracle(oa, g);
    else if (*report) run_report(ra);
  } catch (const Failure& f) {
    log(Level::Error, f.message);
    return f.status;
  } catch (const std::logic_error& e) {
    log(Level::Error, e.what());
    return GRW_ERROR_VALIDATION;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return GRW_ERROR_RUNTIME;
  }
  return 0;
}
