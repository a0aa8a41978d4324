#include "grwalk/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

#include "grwalk/timeutil.hpp"

namespace grwalk {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::optional<double> parse_price(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value) || value <= 0.0) return std::nullopt;
  return value;
}

}  // namespace

TickParseResult parse_ticks(std::istream& source, const TickParseOptions& options) {
  if (!source) throw ValidationError("unreadable quote source");
  std::string line;
  if (!std::getline(source, line)) throw ValidationError("quote source has no header row");

  const auto header = split(line, options.delimiter);
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower(header[i]) == name) return i;
    throw ValidationError("missing required column '" + std::string(name) + "'");
  };
  const std::size_t ts_col = column("timestamp");
  std::size_t bid_col = 0, ask_col = 0, mid_col = 0;
  if (options.schema == QuoteSchema::BidAsk) {
    bid_col = column("bid");
    ask_col = column("ask");
  } else {
    mid_col = column("midprice");
  }

  TickParseResult result;
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    ++result.rows;
    const auto fields = split(line, options.delimiter);
    if (fields.size() != header.size()) {
      ++result.malformed;
      continue;
    }
    TickRecord tick;
    try {
      tick.timestamp = parse_timestamp(fields[ts_col]);
    } catch (const ValidationError&) {
      ++result.malformed;
      continue;
    }
    std::optional<double> bid, ask;
    if (options.schema == QuoteSchema::BidAsk) {
      bid = parse_price(fields[bid_col]);
      ask = parse_price(fields[ask_col]);
    } else {
      bid = ask = parse_price(fields[mid_col]);
    }
    if (!bid || !ask) {
      ++result.malformed;
      continue;
    }
    if (*ask < *bid) {
      ++result.crossed;
      continue;
    }
    tick.best_bid = *bid;
    tick.best_ask = *ask;
    result.ticks.push_back(tick);
  }
  if (source.bad()) throw ValidationError("error while reading quote source");
  if (result.rows > 0 && static_cast<double>(result.malformed) >
                             options.max_malformed_fraction * static_cast<double>(result.rows)) {
    throw ValidationError("too many malformed rows: " + std::to_string(result.malformed) + " of " +
                          std::to_string(result.rows));
  }
  return result;
}

TickParseResult parse_ticks_file(const std::filesystem::path& path,
                                 const TickParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open quote file '" + path.string() + "'");
  return parse_ticks(in, options);
}

MidpriceSeries compute_midprice(std::span<const TickRecord> ticks) {
  MidpriceSeries series;
  series.events.reserve(ticks.size());
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const auto& t = ticks[i];
    if (!(t.best_bid > 0.0) || !(t.best_ask >= t.best_bid))
      throw ValidationError("invalid quote at tick " + std::to_string(i));
    if (i > 0 && t.timestamp < ticks[i - 1].timestamp)
      throw ValidationError("quotes out of time order at tick " + std::to_string(i));
    series.events.push_back({t.timestamp, 0.5 * (t.best_bid + t.best_ask), day_of(t.timestamp)});
  }
  return series;
}

void SessionConfig::validate() const {
  if (session_close <= session_open) throw ValidationError("session close must follow open");
  if (trim_open.count() < 0 || trim_close.count() < 0)
    throw ValidationError("session trims must be non-negative");
  if (trim_open + trim_close >= session_close - session_open)
    throw ValidationError("session trims leave no trading window");
}

MidpriceSeries session_filter(const MidpriceSeries& series, const SessionConfig& cfg) {
  cfg.validate();
  MidpriceSeries out;
  out.events.reserve(series.events.size());
  const auto lo = cfg.window_start();
  const auto hi = cfg.window_end();
  for (const auto& e : series.events) {
    const auto tod = e.timestamp - Timestamp{e.day.time_since_epoch()};
    if (tod >= lo && tod < hi) out.events.push_back(e);
  }
  return out;
}

ReturnDecomposition extract_nonzero_returns(const MidpriceSeries& series) {
  DecompositionColumns cols;
  const auto& ev = series.events;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].day != ev[i - 1].day) continue;
    const double r = std::log(ev[i].midprice) - std::log(ev[i - 1].midprice);
    if (r == 0.0) continue;
    cols.signs.push_back(r > 0.0 ? 1 : -1);
    cols.sizes.push_back(std::abs(r));
    cols.timestamps.push_back(ev[i].timestamp);
    cols.days.push_back(ev[i].day);
  }
  return validate_decomposition(std::move(cols));
}

IngestResult ingest(std::istream& source, const TickParseOptions& parse,
                    const SessionConfig& session) {
  auto parsed = parse_ticks(source, parse);
  const auto mid = compute_midprice(parsed.ticks);
  const auto filtered = session_filter(mid, session);
  IngestResult result{extract_nonzero_returns(filtered), {}};
  auto& s = result.stats;
  s.rows = parsed.rows;
  s.malformed = parsed.malformed;
  s.crossed = parsed.crossed;
  s.ticks = parsed.ticks.size();
  s.in_session = filtered.events.size();
  s.returns = result.decomposition.size();
  s.trading_days =
      std::set<TradingDay>(result.decomposition.days().begin(), result.decomposition.days().end())
          .size();
  return result;
}

}  // namespace grwalk
