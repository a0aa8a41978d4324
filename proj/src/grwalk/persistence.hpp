#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "grwalk/ingestion.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

// Decomposition files are CSV with a leading metadata comment:
//
//   # grwalk-decomposition v1 session=08:00:00-16:30:00 trim=15m,15m
//   timestamp,trading_day,sign,size
//   2024-01-02T08:15:00.5,2024-01-02,1,0.0001234
//
// Sizes are written with round-trip precision so a read reproduces the
// series bit for bit.

struct DecompositionFile {
  ReturnDecomposition decomposition;
  std::optional<SessionConfig> session;
};

void write_decomposition(std::ostream& out, const ReturnDecomposition& d,
                         const std::optional<SessionConfig>& session);
void write_decomposition_file(const std::filesystem::path& path, const ReturnDecomposition& d,
                              const std::optional<SessionConfig>& session);

[[nodiscard]] DecompositionFile read_decomposition(std::istream& in);
[[nodiscard]] DecompositionFile read_decomposition_file(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace grwalk
