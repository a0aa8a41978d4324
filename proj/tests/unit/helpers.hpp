#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "grwalk/timeutil.hpp"
#include "grwalk/types.hpp"

namespace grwalk::test {

/// Events one second apart from 08:15 on a single day.
inline DecompositionColumns one_day_columns(std::vector<std::int8_t> signs,
                                            std::vector<double> sizes,
                                            const char* day = "2000-05-02") {
  DecompositionColumns c;
  const TradingDay d = parse_date(day);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    c.timestamps.push_back(d + std::chrono::hours{8} + std::chrono::minutes{15} +
                           std::chrono::seconds{static_cast<long>(i)});
    c.days.push_back(d);
  }
  c.signs = std::move(signs);
  c.sizes = std::move(sizes);
  return c;
}

inline ReturnDecomposition one_day(std::vector<std::int8_t> signs, std::vector<double> sizes) {
  return validate_decomposition(one_day_columns(std::move(signs), std::move(sizes)));
}

}  // namespace grwalk::test
