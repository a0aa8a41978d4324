#include "grwalk/persistence.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "grwalk/timeutil.hpp"

namespace grwalk {
namespace {

constexpr std::string_view kMagic = "# grwalk-decomposition v1";
constexpr std::string_view kHeader = "timestamp,trading_day,sign,size";

std::string session_comment(const SessionConfig& s) {
  return " session=" + format_time_of_day(s.session_open) + "-" +
         format_time_of_day(s.session_close) + " trim=" + format_duration(s.trim_open) + "," +
         format_duration(s.trim_close);
}

std::string_view field_value(std::string_view line, std::string_view key) {
  const auto pos = line.find(key);
  if (pos == std::string_view::npos) return {};
  auto rest = line.substr(pos + key.size());
  return rest.substr(0, rest.find(' '));
}

SessionConfig parse_session_comment(std::string_view line) {
  SessionConfig s;
  const auto hours = field_value(line, "session=");
  const auto trims = field_value(line, "trim=");
  const auto dash = hours.find('-');
  const auto comma = trims.find(',');
  if (dash == std::string_view::npos || comma == std::string_view::npos)
    throw ValidationError("decomposition: malformed session metadata");
  s.session_open = parse_time_of_day(hours.substr(0, dash));
  s.session_close = parse_time_of_day(hours.substr(dash + 1));
  s.trim_open = parse_duration(trims.substr(0, comma));
  s.trim_close = parse_duration(trims.substr(comma + 1));
  s.validate();
  return s;
}

std::string_view next_field(std::string_view& rest) {
  const auto comma = rest.find(',');
  auto field = rest.substr(0, comma);
  rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  return field;
}

}  // namespace

void write_decomposition(std::ostream& out, const ReturnDecomposition& d,
                         const std::optional<SessionConfig>& session) {
  out << kMagic;
  if (session) out << session_comment(*session);
  out << '\n' << kHeader << '\n';
  const auto signs = d.signs();
  const auto sizes = d.sizes();
  const auto ts = d.timestamps();
  const auto days = d.days();
  char buf[32];
  for (std::size_t t = 0; t < d.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", sizes[t]);
    out << format_timestamp(ts[t]) << ',' << format_date(days[t]) << ','
        << static_cast<int>(signs[t]) << ',' << buf << '\n';
  }
  if (!out) throw RuntimeError("decomposition: write failed");
}

void write_decomposition_file(const std::filesystem::path& path, const ReturnDecomposition& d,
                              const std::optional<SessionConfig>& session) {
  std::ostringstream out;
  write_decomposition(out, d, session);
  write_text_file(path, out.str());
}

DecompositionFile read_decomposition(std::istream& in) {
  DecompositionFile file;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("decomposition: empty input");
  if (line.starts_with(kMagic)) {
    if (line.find("session=") != std::string::npos) file.session = parse_session_comment(line);
    if (!std::getline(in, line)) throw ValidationError("decomposition: missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw ValidationError("decomposition: expected header '" + std::string(kHeader) + "'");

  DecompositionColumns cols;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest = line;
    const auto ts = next_field(rest);
    const auto day = next_field(rest);
    const auto sign = next_field(rest);
    const auto size = next_field(rest);
    if (size.empty() || !rest.empty())
      throw ValidationError("decomposition: row " + std::to_string(row) + " needs 4 fields");
    int s = 0;
    double w = 0.0;
    const auto rs = std::from_chars(sign.data(), sign.data() + sign.size(), s);
    const auto rw = std::from_chars(size.data(), size.data() + size.size(), w);
    if (rs.ec != std::errc{} || rs.ptr != sign.data() + sign.size() || rw.ec != std::errc{} ||
        rw.ptr != size.data() + size.size())
      throw ValidationError("decomposition: bad number in row " + std::to_string(row));
    if (s != 1 && s != -1)
      throw ValidationError("invalid sign at index " + std::to_string(cols.signs.size()));
    cols.timestamps.push_back(parse_timestamp(ts));
    cols.days.push_back(parse_date(day));
    cols.signs.push_back(static_cast<std::int8_t>(s));
    cols.sizes.push_back(w);
  }
  file.decomposition = validate_decomposition(std::move(cols));
  return file;
}

DecompositionFile read_decomposition_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open decomposition file " + path.string());
  return read_decomposition(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw RuntimeError("write to " + path.string() + " failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing input file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace grwalk
