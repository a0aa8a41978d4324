#include "grwalk/types.hpp"

#include <cmath>
#include <string>

namespace grwalk {

std::vector<double> ReturnDecomposition::returns() const {
  std::vector<double> r(size());
  for (std::size_t t = 0; t < r.size(); ++t) r[t] = return_at(t);
  return r;
}

std::vector<double> ReturnDecomposition::signs_as_real() const {
  return {cols_.signs.begin(), cols_.signs.end()};
}

ReturnDecomposition ReturnDecomposition::with_values(std::vector<std::int8_t> signs,
                                                     std::vector<double> sizes) const {
  if (signs.size() != size() || sizes.size() != size())
    throw ValidationError("with_values: length mismatch");
  DecompositionColumns cols{std::move(signs), std::move(sizes), cols_.timestamps, cols_.days};
  return ReturnDecomposition(std::move(cols));
}

ReturnDecomposition validate_decomposition(DecompositionColumns cols) {
  const std::size_t n = cols.sizes.size();
  if (cols.signs.size() != n || cols.timestamps.size() != n || cols.days.size() != n) {
    throw ValidationError("length mismatch: signs=" + std::to_string(cols.signs.size()) +
                          " sizes=" + std::to_string(n) +
                          " timestamps=" + std::to_string(cols.timestamps.size()) +
                          " days=" + std::to_string(cols.days.size()));
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (cols.signs[t] != 1 && cols.signs[t] != -1)
      throw ValidationError("invalid sign at index " + std::to_string(t));
    const double w = cols.sizes[t];
    if (w == 0.0) throw ValidationError("zero size at index " + std::to_string(t));
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("non-positive or non-finite size at index " + std::to_string(t));
    if (day_of(cols.timestamps[t]) != cols.days[t])
      throw ValidationError("timestamp outside its trading day at index " + std::to_string(t));
    if (t > 0) {
      if (cols.days[t] < cols.days[t - 1])
        throw ValidationError("time disorder (trading day) at index " + std::to_string(t));
      if (cols.timestamps[t] < cols.timestamps[t - 1])
        throw ValidationError("time disorder at index " + std::to_string(t));
    }
  }
  return ReturnDecomposition(std::move(cols));
}

ReturnDecomposition decompose_returns(std::span<const double> returns,
                                      std::vector<Timestamp> timestamps,
                                      std::vector<TradingDay> days) {
  DecompositionColumns cols;
  cols.signs.reserve(returns.size());
  cols.sizes.reserve(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t) {
    if (returns[t] == 0.0) throw ValidationError("zero size at index " + std::to_string(t));
    cols.signs.push_back(returns[t] > 0.0 ? 1 : -1);
    cols.sizes.push_back(std::abs(returns[t]));
  }
  cols.timestamps = std::move(timestamps);
  cols.days = std::move(days);
  return validate_decomposition(std::move(cols));
}

}  // namespace grwalk
