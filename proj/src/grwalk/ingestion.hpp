#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "grwalk/types.hpp"

namespace grwalk {

enum class QuoteSchema { BidAsk, Midprice };

struct TickParseOptions {
  QuoteSchema schema = QuoteSchema::BidAsk;
  char delimiter = ',';
  /// Abort when more than this fraction of data rows is malformed.
  double max_malformed_fraction = 0.05;
};

struct TickParseResult {
  std::vector<TickRecord> ticks;
  std::size_t rows = 0;
  std::size_t malformed = 0;
  std::size_t crossed = 0;
};

/// Reads delimited text whose header names `timestamp,bid,ask` (or
/// `timestamp,midprice`). A midprice row becomes a tick with bid == ask.
[[nodiscard]] TickParseResult parse_ticks(std::istream& source, const TickParseOptions& options);
[[nodiscard]] TickParseResult parse_ticks_file(const std::filesystem::path& path,
                                               const TickParseOptions& options);

[[nodiscard]] MidpriceSeries compute_midprice(std::span<const TickRecord> ticks);

struct SessionConfig {
  Nanoseconds session_open = std::chrono::hours{8};
  Nanoseconds session_close = std::chrono::hours{16} + std::chrono::minutes{30};
  Nanoseconds trim_open = std::chrono::minutes{15};
  Nanoseconds trim_close = std::chrono::minutes{15};

  [[nodiscard]] Nanoseconds window_start() const { return session_open + trim_open; }
  [[nodiscard]] Nanoseconds window_end() const { return session_close - trim_close; }
  void validate() const;
};

/// Keeps events whose time of day lies in [open + trim_open, close - trim_close).
[[nodiscard]] MidpriceSeries session_filter(const MidpriceSeries& series, const SessionConfig& cfg);

/// Natural-log returns between consecutive quotes of the same trading day,
/// zero returns dropped. Each return carries the timestamp of its later quote.
[[nodiscard]] ReturnDecomposition extract_nonzero_returns(const MidpriceSeries& series);

struct IngestStats {
  std::size_t rows = 0;
  std::size_t malformed = 0;
  std::size_t crossed = 0;
  std::size_t ticks = 0;
  std::size_t in_session = 0;
  std::size_t returns = 0;
  std::size_t trading_days = 0;
};

struct IngestResult {
  ReturnDecomposition decomposition;
  IngestStats stats;
};

[[nodiscard]] IngestResult ingest(std::istream& source, const TickParseOptions& parse,
                                  const SessionConfig& session);

}  // namespace grwalk
