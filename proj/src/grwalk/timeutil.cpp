#include "grwalk/timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace grwalk {
namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > text.size()) throw ValidationError("truncated " + std::string(what));
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len)
    throw ValidationError("bad " + std::string(what) + " in '" + std::string(text) + "'");
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw ValidationError("malformed timestamp '" + std::string(text) + "'");
}

}  // namespace

TradingDay parse_date(std::string_view text) {
  using namespace std::chrono;
  const int y = read_int(text, 0, 4, "year");
  expect(text, 4, '-');
  const int m = read_int(text, 5, 2, "month");
  expect(text, 7, '-');
  const int d = read_int(text, 8, 2, "day");
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ValidationError("invalid date '" + std::string(text) + "'");
  return sys_days{ymd};
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  if (text.size() < 19) throw ValidationError("malformed timestamp '" + std::string(text) + "'");
  const TradingDay date = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != ' ')
    throw ValidationError("malformed timestamp '" + std::string(text) + "'");
  const int hh = read_int(text, 11, 2, "hour");
  expect(text, 13, ':');
  const int mm = read_int(text, 14, 2, "minute");
  expect(text, 16, ':');
  const int ss = read_int(text, 17, 2, "second");
  if (hh > 23 || mm > 59 || ss > 60)
    throw ValidationError("time of day out of range in '" + std::string(text) + "'");
  std::int64_t frac_ns = 0;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::int64_t scale = 100'000'000;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 9) {
        frac_ns += (text[pos] - '0') * scale;
        scale /= 10;
      }
      ++digits;
      ++pos;
    }
    if (digits == 0) throw ValidationError("malformed fraction in '" + std::string(text) + "'");
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size())
    throw ValidationError("trailing characters in timestamp '" + std::string(text) + "'");
  return Timestamp{date.time_since_epoch()} + hours{hh} + minutes{mm} + seconds{ss} +
         nanoseconds{frac_ns};
}

std::string format_date(TradingDay d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const TradingDay d = day_of(t);
  const auto since_midnight = t - Timestamp{d.time_since_epoch()};
  const auto total_ns = since_midnight.count();
  const std::int64_t secs = total_ns / 1'000'000'000;
  const std::int64_t frac = total_ns % 1'000'000'000;
  char buf[48];
  int len = std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld", format_date(d).c_str(),
                          static_cast<long long>(secs / 3600),
                          static_cast<long long>((secs / 60) % 60),
                          static_cast<long long>(secs % 60));
  std::string out(buf, static_cast<std::size_t>(len));
  if (frac != 0) {
    std::snprintf(buf, sizeof buf, ".%09lld", static_cast<long long>(frac));
    std::string f(buf);
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  return out;
}

Nanoseconds parse_duration(std::string_view text) {
  using namespace std::chrono;
  if (text.empty()) throw ValidationError("empty duration");
  std::size_t split = 0;
  while (split < text.size() && ((text[split] >= '0' && text[split] <= '9') || text[split] == '.'))
    ++split;
  const std::string number(text.substr(0, split));
  const std::string_view unit = text.substr(split);
  if (number.empty()) throw ValidationError("bad duration '" + std::string(text) + "'");
  double value = 0.0;
  try {
    value = std::stod(number);
  } catch (const std::exception&) {
    throw ValidationError("bad duration '" + std::string(text) + "'");
  }
  double ns_per_unit = 0.0;
  if (unit == "ns") ns_per_unit = 1.0;
  else if (unit == "us") ns_per_unit = 1e3;
  else if (unit == "ms") ns_per_unit = 1e6;
  else if (unit == "s") ns_per_unit = 1e9;
  else if (unit == "m" || unit == "min" || unit.empty()) ns_per_unit = 60e9;
  else if (unit == "h") ns_per_unit = 3600e9;
  else throw ValidationError("unknown duration unit in '" + std::string(text) + "'");
  return Nanoseconds{static_cast<std::int64_t>(value * ns_per_unit + 0.5)};
}

std::string format_duration(Nanoseconds d) {
  using namespace std::chrono;
  const auto ns = d.count();
  if (ns == 0) return "0";
  if (ns % 3'600'000'000'000 == 0) return std::to_string(ns / 3'600'000'000'000) + "h";
  if (ns % 60'000'000'000 == 0) return std::to_string(ns / 60'000'000'000) + "m";
  if (ns % 1'000'000'000 == 0) return std::to_string(ns / 1'000'000'000) + "s";
  return std::to_string(ns) + "ns";
}

Nanoseconds parse_time_of_day(std::string_view text) {
  using namespace std::chrono;
  const int hh = read_int(text, 0, 2, "hour");
  expect(text, 2, ':');
  const int mm = read_int(text, 3, 2, "minute");
  int ss = 0;
  if (text.size() > 5) {
    expect(text, 5, ':');
    ss = read_int(text, 6, 2, "second");
    if (text.size() != 8) throw ValidationError("bad time of day '" + std::string(text) + "'");
  }
  if (hh > 24 || mm > 59 || ss > 59)
    throw ValidationError("bad time of day '" + std::string(text) + "'");
  return hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_time_of_day(Nanoseconds offset) {
  using namespace std::chrono;
  const auto total = duration_cast<seconds>(offset).count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(total / 3600),
                static_cast<long long>(total / 60 % 60), static_cast<long long>(total % 60));
  return buf;
}

}  // namespace grwalk
