#pragma once

#include <filesystem>
#include <initializer_list>
#include <string_view>
#include <string>
#include <vector>

#include <json.hpp>

#include "grwalk/analysis.hpp"
#include "grwalk/model.hpp"
#include "grwalk/resampling.hpp"
#include "grwalk/synthetic.hpp"

namespace grwalk {

using Json = nlohmann::ordered_json;

/// Rejects keys of object `j` not listed in `allowed`.
void check_json_keys(const Json& j, std::string_view where,
                     std::initializer_list<std::string_view> allowed);

template <class T>
[[nodiscard]] T json_value(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("bad value for '") + key + "'");
  }
}

/// Every number in a report goes through this: 10 significant digits.
[[nodiscard]] double round_report(double x);
[[nodiscard]] std::string format_report(double x);

[[nodiscard]] Json to_json(const AnalysisReport& r);

/// `with_intervals` adds the per-interval records (large for long series).
[[nodiscard]] Json to_json(const RhoReport& r, bool with_intervals);
/// Columns bin_mean_Vhat,mean_rho,stderr,count; an undefined stderr is empty.
[[nodiscard]] std::string bins_csv(const std::vector<RhoBin>& bins);

/// A shuffle run over one or more block lengths sharing mode, interval and seed.
[[nodiscard]] Json to_json(const std::vector<ExperimentReport>& runs);
/// Columns block_length,mean_rho,stderr,spread,replicates.
[[nodiscard]] std::string rho_vs_block_length_csv(const std::vector<ExperimentReport>& runs);

/// Process spec documents:
///   {"length": N, "signs": {"model": "iid", "p": 0.5} | {"model": "markov", "persistence": q},
///    "sizes": {"model": "constant", "w": 1} | {"model": "iid_lognormal", "mu_log", "sigma_log"}
///             | {"model": "lognormal_longmemory", "H", "mu_log", "sigma_log"},
///    "coupling": {"lag": 1, "beta": 0.5},
///    "calendar": {"first_day", "events_per_hour", "rate_dispersion", "trading_days",
///                 "session_open", "session_close", "trim_open", "trim_close"}}
/// Unknown keys are rejected. The seed is never read from the document.
[[nodiscard]] ProcessSpec process_spec_from_json(const Json& j);
[[nodiscard]] Json to_json(const ProcessSpec& spec);

struct OracleRow {
  VarianceEstimate monte_carlo;
  std::optional<double> predicted;  // nullopt for coupled processes
};
[[nodiscard]] Json oracle_to_json(const ProcessSpec& spec, std::uint64_t seed,
                                  const std::vector<OracleRow>& rows);

struct ReportInputs {
  std::filesystem::path analysis;
  std::vector<std::filesystem::path> models;
  std::vector<std::filesystem::path> experiments;
};

/// Consolidated bundle written into out_dir:
///   report.json      everything below in one document
///   summary.csv      counts, tail index and Hurst exponents
///   rho_table.csv    rho by mode, block length and interval length
///   rho_bins.csv     binned rho curves for every interval length
///   rho_vs_L.csv     rho against block length for every sweep
/// Returns the report document.
Json build_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

}  // namespace grwalk
