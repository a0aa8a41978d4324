#include "grwalk/reports.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "grwalk/persistence.hpp"
#include "grwalk/timeutil.hpp"

namespace grwalk {
namespace {

Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_report(x);
}

Json num(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

Json nums(std::span<const double> xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

Json weighted(const std::optional<WeightedMean>& m) {
  if (!m) return nullptr;
  return {{"value", num(m->value)}, {"stderr", num(m->standard_error)}};
}

Json unit_root(const UnitRootResult& r) {
  return {{"test", to_string(r.test)},  {"statistic", num(r.statistic)},
          {"p_value", num(r.p_value)},  {"lags", r.lags},
          {"root", num(r.root)},        {"n_obs", r.n_obs}};
}

Json hurst(const HurstEstimate& h) {
  return {{"H", num(h.H)},
          {"stderr", num(h.standard_error)},
          {"gamma", num(gamma_from_hurst(h.H))},
          {"window_sizes", h.window_sizes},
          {"fluctuations", nums(h.fluctuations)}};
}

Json component(const ComponentSummary& c) {
  Json j = {{"mean", num(c.moments.mean)},
            {"variance", num(c.moments.variance)},
            {"acf", {{"max_lag", c.acf.max_lag}, {"n_obs", c.acf.n_obs}, {"values", nums(c.acf.values)}}},
            {"cumulative_acf", num(c.cumulative_acf)},
            {"dfa", hurst(c.hurst)},
            {"adf", unit_root(c.adf)},
            {"pp", unit_root(c.pp)}};
  if (c.hurst_bootstrap_se) j["dfa"]["bootstrap_stderr"] = num(*c.hurst_bootstrap_se);
  return j;
}

Json bin(const RhoBin& b) {
  return {{"mean_V_hat", num(b.mean_V_hat)},
          {"mean_rho", num(b.mean_rho)},
          {"stderr", num(b.standard_error)},
          {"count", b.count}};
}

Json bins_json(const std::vector<RhoBin>& bins) {
  Json a = Json::array();
  for (const auto& b : bins) a.push_back(bin(b));
  return a;
}

std::string csv_num(double x) { return std::isfinite(x) ? format_report(x) : ""; }
std::string csv_num(const std::optional<double>& x) { return x ? csv_num(*x) : ""; }

Json load_json(const std::filesystem::path& path, std::string_view kind) {
  if (!std::filesystem::exists(path))
    throw ValidationError("missing input file " + path.string());
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object() || j.value("kind", "") != kind)
    throw ValidationError(path.string() + ": expected a '" + std::string(kind) + "' document");
  return j;
}

std::string json_csv(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return csv_num(v.get<double>());
  if (v.is_number()) return std::to_string(v.get<long long>());
  return v.get<std::string>();
}

}  // namespace

void check_json_keys(const Json& j, std::string_view where,
                     std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
  }
}

double round_report(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return std::strtod(buf, nullptr);
}

std::string format_report(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Json to_json(const AnalysisReport& r) {
  const auto& o = r.options;
  Json params = {{"max_lag", o.max_lag},
                 {"hill_k", o.hill_k ? Json(*o.hill_k) : Json("auto")},
                 {"dfa_order", o.dfa.detrend_order},
                 {"dfa_windows", o.dfa.num_windows},
                 {"dfa_min_window", o.dfa.min_window},
                 {"deterministic", to_string(o.deterministic)},
                 {"adf_lags", o.adf_lags ? Json(*o.adf_lags) : Json("schwert")},
                 {"cross_lag", o.cross_lag},
                 {"day_min_events", o.day_min_events},
                 {"level", num(o.level)}};
  if (o.bootstrap)
    params["bootstrap"] = {{"block_length", o.bootstrap->block_length},
                           {"replicates", o.bootstrap->replicates},
                           {"seed", o.bootstrap->seed}};
  Json tail = {{"alpha", num(r.tail.alpha)}, {"stderr", num(r.tail.standard_error)}, {"k", r.tail.k}};
  if (r.tail_bootstrap_se) tail["bootstrap_stderr"] = num(*r.tail_bootstrap_se);
  const auto& rej = r.daily.rejected;
  Json cross_lags = Json::array();
  for (long l : r.cross.lags) cross_lags.push_back(l);
  return {{"kind", "analysis"},
          {"parameters", params},
          {"events", r.events},
          {"trading_days", r.trading_days},
          {"mean_events_per_day", num(r.mean_events_per_day)},
          {"signs", component(r.signs)},
          {"sizes", component(r.sizes)},
          {"tail_index", tail},
          {"daily_stationarity",
           {{"days_tested", r.daily.days_tested},
            {"days_skipped", r.daily.days_skipped},
            {"level", num(r.daily.level)},
            {"rejection_fraction",
             {{"adf_signs", num(rej.adf_signs)},
              {"pp_signs", num(rej.pp_signs)},
              {"adf_sizes", num(rej.adf_sizes)},
              {"pp_sizes", num(rej.pp_sizes)}}}}},
          {"cross_correlation",
           {{"definition", "corr(sign_t, size_{t+lag})"},
            {"n_obs", r.cross.n_obs},
            {"band", num(r.cross.band)},
            {"lags", cross_lags},
            {"values", nums(r.cross.values)}}}};
}

Json to_json(const RhoReport& r, bool with_intervals) {
  Json j = {{"kind", "rho_report"},
            {"interval", format_duration(r.interval_length)},
            {"intervals_used", r.per_interval.size()},
            {"skipped",
             {{"too_few_events", r.skipped.too_few_events},
              {"nonpositive_V_hat", r.skipped.nonpositive_V_hat}}},
            {"truncated_kernel_intervals", r.truncated_kernel_intervals},
            {"weighted_mean_rho", weighted(r.weighted_mean_rho)},
            {"raw_mean_rho", weighted(r.raw_mean_rho)},
            {"bins", bins_json(r.bins)}};
  if (with_intervals) {
    Json rows = Json::array();
    for (const auto& rec : r.per_interval)
      rows.push_back({{"interval", rec.interval},
                      {"start", format_timestamp(rec.start)},
                      {"n", rec.n},
                      {"mu_s", num(rec.mu_s)},
                      {"sigma2_s", num(rec.sigma2_s)},
                      {"mu_w", num(rec.mu_w)},
                      {"sigma2_w", num(rec.sigma2_w)},
                      {"R", num(rec.R)},
                      {"V_hat", num(rec.V_hat)},
                      {"rho", num(rec.rho)}});
    j["per_interval"] = std::move(rows);
  }
  return j;
}

std::string bins_csv(const std::vector<RhoBin>& bins) {
  std::ostringstream out;
  out << "bin_mean_Vhat,mean_rho,stderr,count\n";
  for (const auto& b : bins)
    out << csv_num(b.mean_V_hat) << ',' << csv_num(b.mean_rho) << ','
        << csv_num(b.standard_error) << ',' << b.count << '\n';
  return out.str();
}

Json to_json(const std::vector<ExperimentReport>& runs) {
  if (runs.empty()) throw ValidationError("experiment report needs at least one run");
  const auto& first = runs.front();
  Json out = {{"kind", "experiment"},
              {"mode", to_string(first.spec.mode)},
              {"interval", format_duration(first.interval_length)},
              {"seed", first.spec.seed},
              {"replicates", first.spec.replicates}};
  Json items = Json::array();
  for (const auto& run : runs) {
    Json reps = Json::array();
    for (const auto& rep : run.replicates) {
      reps.push_back({{"seed", rep.seed},
                      {"weighted_mean_rho", weighted(rep.weighted_mean_rho)},
                      {"raw_mean_rho", weighted(rep.raw_mean_rho)},
                      {"intervals", rep.intervals}});
    }
    std::vector<double> raw;
    for (const auto& rep : run.replicates)
      if (rep.raw_mean_rho) raw.push_back(rep.raw_mean_rho->value);
    Json item = {{"block_length", is_block_mode(run.spec.mode) ? Json(run.spec.block_length)
                                                                : Json(nullptr)},
                 {"mean_rho", num(run.mean_rho)},
                 {"stderr", num(run.standard_error)},
                 {"spread", num(run.spread)},
                 {"raw_mean_rho", raw.empty() ? Json(nullptr) : num(sample_mean(raw))},
                 {"bins", bins_json(run.bins)},
                 {"replicate_results", std::move(reps)}};
    items.push_back(std::move(item));
  }
  out["runs"] = std::move(items);
  return out;
}

std::string rho_vs_block_length_csv(const std::vector<ExperimentReport>& runs) {
  std::ostringstream out;
  out << "block_length,mean_rho,stderr,spread,replicates\n";
  for (const auto& run : runs)
    out << run.spec.block_length << ',' << csv_num(run.mean_rho) << ','
        << csv_num(run.standard_error) << ',' << csv_num(run.spread) << ','
        << run.spec.replicates << '\n';
  return out.str();
}

ProcessSpec process_spec_from_json(const Json& j) {
  check_json_keys(j, "process spec", {"length", "signs", "sizes", "coupling", "calendar"});
  ProcessSpec spec;
  spec.length = json_value<std::size_t>(j, "length", 0);

  if (j.contains("signs")) {
    const auto& s = j.at("signs");
    const auto model = json_value<std::string>(s, "model", "iid");
    if (model == "iid") {
      check_json_keys(s, "signs", {"model", "p"});
      spec.signs.kind = SignModel::Kind::Iid;
      spec.signs.p = json_value(s, "p", 0.5);
    } else if (model == "markov") {
      check_json_keys(s, "signs", {"model", "persistence", "initial_sign"});
      spec.signs.kind = SignModel::Kind::Markov;
      spec.signs.persistence = json_value(s, "persistence", 0.5);
      if (s.contains("initial_sign")) spec.signs.initial_sign = json_value(s, "initial_sign", 1);
    } else {
      throw ValidationError("signs: unknown model '" + model + "' (expected iid or markov)");
    }
  }

  if (j.contains("sizes")) {
    const auto& s = j.at("sizes");
    const auto model = json_value<std::string>(s, "model", "constant");
    if (model == "constant") {
      check_json_keys(s, "sizes", {"model", "w"});
      spec.sizes.kind = SizeModel::Kind::Constant;
      spec.sizes.w = json_value(s, "w", 1.0);
    } else if (model == "iid_lognormal") {
      check_json_keys(s, "sizes", {"model", "mu_log", "sigma_log"});
      spec.sizes.kind = SizeModel::Kind::IidLognormal;
    } else if (model == "lognormal_longmemory") {
      check_json_keys(s, "sizes", {"model", "mu_log", "sigma_log", "H"});
      spec.sizes.kind = SizeModel::Kind::LognormalLongMemory;
      spec.sizes.H = json_value(s, "H", 0.5);
    } else {
      throw ValidationError("sizes: unknown model '" + model +
                            "' (expected constant, iid_lognormal or lognormal_longmemory)");
    }
    spec.sizes.mu_log = json_value(s, "mu_log", 0.0);
    spec.sizes.sigma_log = json_value(s, "sigma_log", 0.0);
  }

  if (j.contains("coupling")) {
    const auto& c = j.at("coupling");
    check_json_keys(c, "coupling", {"lag", "beta"});
    spec.coupling.lag = json_value<std::size_t>(c, "lag", 0);
    spec.coupling.beta = json_value(c, "beta", 0.0);
  }

  if (j.contains("calendar")) {
    const auto& c = j.at("calendar");
    check_json_keys(c, "calendar",
               {"first_day", "events_per_hour", "rate_dispersion", "trading_days", "session_open",
                "session_close", "trim_open", "trim_close"});
    auto& cal = spec.calendar;
    if (c.contains("first_day")) cal.first_day = parse_date(json_value<std::string>(c, "first_day", ""));
    cal.events_per_hour = json_value(c, "events_per_hour", cal.events_per_hour);
    cal.rate_dispersion = json_value(c, "rate_dispersion", cal.rate_dispersion);
    cal.trading_days = json_value<std::size_t>(c, "trading_days", 0);
    if (c.contains("session_open"))
      cal.session.session_open = parse_time_of_day(json_value<std::string>(c, "session_open", ""));
    if (c.contains("session_close"))
      cal.session.session_close = parse_time_of_day(json_value<std::string>(c, "session_close", ""));
    if (c.contains("trim_open"))
      cal.session.trim_open = parse_duration(json_value<std::string>(c, "trim_open", ""));
    if (c.contains("trim_close"))
      cal.session.trim_close = parse_duration(json_value<std::string>(c, "trim_close", ""));
  }
  if (spec.length == 0 && spec.calendar.trading_days == 0)
    throw ValidationError("process spec needs a positive length or calendar.trading_days");
  spec.validate();
  return spec;
}

Json to_json(const ProcessSpec& spec) {
  Json signs;
  if (spec.signs.kind == SignModel::Kind::Iid) {
    signs = {{"model", "iid"}, {"p", num(spec.signs.p)}};
  } else {
    signs = {{"model", "markov"}, {"persistence", num(spec.signs.persistence)}};
    if (spec.signs.initial_sign) signs["initial_sign"] = *spec.signs.initial_sign;
  }
  Json sizes;
  switch (spec.sizes.kind) {
    case SizeModel::Kind::Constant:
      sizes = {{"model", "constant"}, {"w", num(spec.sizes.w)}};
      break;
    case SizeModel::Kind::IidLognormal:
      sizes = {{"model", "iid_lognormal"},
               {"mu_log", num(spec.sizes.mu_log)},
               {"sigma_log", num(spec.sizes.sigma_log)}};
      break;
    case SizeModel::Kind::LognormalLongMemory:
      sizes = {{"model", "lognormal_longmemory"},
               {"H", num(spec.sizes.H)},
               {"mu_log", num(spec.sizes.mu_log)},
               {"sigma_log", num(spec.sizes.sigma_log)}};
      break;
  }
  const auto& cal = spec.calendar;
  return {{"length", spec.length},
          {"signs", signs},
          {"sizes", sizes},
          {"coupling", {{"lag", spec.coupling.lag}, {"beta", num(spec.coupling.beta)}}},
          {"calendar",
           {{"first_day", format_date(cal.first_day)},
            {"events_per_hour", num(cal.events_per_hour)},
            {"rate_dispersion", num(cal.rate_dispersion)},
            {"trading_days", cal.trading_days},
            {"session_open", format_time_of_day(cal.session.session_open)},
            {"session_close", format_time_of_day(cal.session.session_close)},
            {"trim_open", format_duration(cal.session.trim_open)},
            {"trim_close", format_duration(cal.session.trim_close)}}}};
}

Json oracle_to_json(const ProcessSpec& spec, std::uint64_t seed, const std::vector<OracleRow>& rows) {
  Json items = Json::array();
  for (const auto& row : rows) {
    const auto& mc = row.monte_carlo;
    Json item = {{"n", mc.n},
                 {"monte_carlo_variance", num(mc.variance)},
                 {"stderr", num(mc.standard_error)},
                 {"monte_carlo_mean", num(mc.mean)},
                 {"predicted_variance", num(row.predicted)}};
    item["z_score"] = row.predicted && mc.standard_error > 0.0
                          ? num((mc.variance - *row.predicted) / mc.standard_error)
                          : Json(nullptr);
    items.push_back(std::move(item));
  }
  return {{"kind", "oracle"},
          {"seed", seed},
          {"replicates", rows.empty() ? 0 : rows.front().monte_carlo.replicates},
          {"spec", to_json(spec)},
          {"results", std::move(items)}};
}

Json build_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
  // Load everything first so a missing or malformed input fails before any output.
  const Json analysis = load_json(inputs.analysis, "analysis");
  std::vector<Json> models, experiments;
  for (const auto& p : inputs.models) models.push_back(load_json(p, "rho_report"));
  for (const auto& p : inputs.experiments) experiments.push_back(load_json(p, "experiment"));

  Json summary = {{"events", analysis.at("events")},
                  {"trading_days", analysis.at("trading_days")},
                  {"mean_events_per_day", analysis.at("mean_events_per_day")},
                  {"tail_index", analysis.at("tail_index").at("alpha")},
                  {"tail_index_stderr", analysis.at("tail_index").at("stderr")},
                  {"hurst_signs", analysis.at("signs").at("dfa").at("H")},
                  {"hurst_signs_stderr", analysis.at("signs").at("dfa").at("stderr")},
                  {"hurst_sizes", analysis.at("sizes").at("dfa").at("H")},
                  {"hurst_sizes_stderr", analysis.at("sizes").at("dfa").at("stderr")},
                  {"cumulative_acf_signs", analysis.at("signs").at("cumulative_acf")},
                  {"cumulative_acf_sizes", analysis.at("sizes").at("cumulative_acf")},
                  {"acf_max_lag", analysis.at("signs").at("acf").at("max_lag")}};

  // One row per (mode, block length, interval length).
  Json table = Json::array();
  for (const auto& m : models)
    table.push_back({{"mode", "original"},
                     {"block_length", nullptr},
                     {"interval", m.at("interval")},
                     {"rho", m.at("weighted_mean_rho").is_null() ? Json(nullptr)
                                                                 : m["weighted_mean_rho"]["value"]},
                     {"stderr", m.at("weighted_mean_rho").is_null()
                                    ? Json(nullptr)
                                    : m["weighted_mean_rho"]["stderr"]},
                     {"raw_mean_rho", m.at("raw_mean_rho").is_null() ? Json(nullptr)
                                                                     : m["raw_mean_rho"]["value"]},
                     {"replicates", nullptr}});
  for (const auto& e : experiments)
    for (const auto& run : e.at("runs"))
      table.push_back({{"mode", e.at("mode")},
                       {"block_length", run.at("block_length")},
                       {"interval", e.at("interval")},
                       {"rho", run.at("mean_rho")},
                       {"stderr", run.at("stderr")},
                       {"raw_mean_rho", run.at("raw_mean_rho")},
                       {"replicates", e.at("replicates")}});

  Json curves = Json::array();
  for (const auto& m : models) curves.push_back({{"interval", m.at("interval")}, {"bins", m.at("bins")}});

  Json sweeps = Json::array();
  for (const auto& e : experiments) {
    if (e.at("runs").size() < 2) continue;
    Json points = Json::array();
    for (const auto& run : e.at("runs"))
      points.push_back({{"block_length", run.at("block_length")},
                        {"rho", run.at("mean_rho")},
                        {"stderr", run.at("stderr")}});
    sweeps.push_back({{"mode", e.at("mode")}, {"interval", e.at("interval")}, {"points", points}});
  }

  Json report = {{"kind", "report"},
                 {"summary", summary},
                 {"rho_table", table},
                 {"rho_bins", curves},
                 {"rho_vs_block_length", sweeps}};

  std::ostringstream s;
  s << "statistic,value\n";
  for (const auto& [k, v] : summary.items()) s << k << ',' << json_csv(v) << '\n';

  std::ostringstream t;
  t << "mode,block_length,interval,rho,stderr,raw_mean_rho,replicates\n";
  for (const auto& row : table)
    t << json_csv(row["mode"]) << ',' << json_csv(row["block_length"]) << ','
      << json_csv(row["interval"]) << ',' << json_csv(row["rho"]) << ','
      << json_csv(row["stderr"]) << ',' << json_csv(row["raw_mean_rho"]) << ','
      << json_csv(row["replicates"]) << '\n';

  std::ostringstream b;
  b << "interval,bin,bin_mean_Vhat,mean_rho,stderr,count\n";
  for (const auto& c : curves) {
    std::size_t i = 0;
    for (const auto& bn : c["bins"])
      b << json_csv(c["interval"]) << ',' << i++ << ',' << json_csv(bn["mean_V_hat"]) << ','
        << json_csv(bn["mean_rho"]) << ',' << json_csv(bn["stderr"]) << ','
        << json_csv(bn["count"]) << '\n';
  }

  std::ostringstream l;
  l << "mode,interval,block_length,rho,stderr\n";
  for (const auto& sw : sweeps)
    for (const auto& p : sw["points"])
      l << json_csv(sw["mode"]) << ',' << json_csv(sw["interval"]) << ','
        << json_csv(p["block_length"]) << ',' << json_csv(p["rho"]) << ','
        << json_csv(p["stderr"]) << '\n';

  write_text_file(out_dir / "report.json", report.dump(2) + "\n");
  write_text_file(out_dir / "summary.csv", s.str());
  write_text_file(out_dir / "rho_table.csv", t.str());
  write_text_file(out_dir / "rho_bins.csv", b.str());
  write_text_file(out_dir / "rho_vs_L.csv", l.str());
  return report;
}

}  // namespace grwalk
