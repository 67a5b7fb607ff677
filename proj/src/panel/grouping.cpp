#include <algorithm>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"

namespace gcgail::panel {

namespace {

// Linear interpolation between order statistics at position (n - 1) * q.
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<int> quartile_grouping(std::span<const double> values) {
  if (values.size() < 4) throw ValidationError("quartile grouping needs at least 4 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = percentile(sorted, 0.25);
  const double q2 = percentile(sorted, 0.50);
  const double q3 = percentile(sorted, 0.75);
  std::vector<int> labels;
  labels.reserve(values.size());
  for (double v : values) {
    labels.push_back(v <= q1 ? 1 : v <= q2 ? 2 : v <= q3 ? 3 : 4);
  }
  return labels;
}

}  // namespace gcgail::panel
