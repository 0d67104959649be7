#include "deepsched/kpi/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deepsched {

double geomean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("geomean: empty input");
  double log_sum = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("geomean: negative input");
    log_sum += std::log(v == 0.0 ? 1.0 : v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (q < 0.0 || q > 100.0) throw std::invalid_argument("percentile: q out of [0,100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q / 100.0;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::optional<double> upt(double served_bits, long long busy_ttis, double tti_duration_s) {
  if (busy_ttis <= 0) return std::nullopt;
  return served_bits / (static_cast<double>(busy_ttis) * tti_duration_s);
}

GainRow gain_table(std::span<const double> candidate, std::span<const double> baseline) {
  GainRow row;
  const double b5 = percentile(baseline, 5.0);
  const double b50 = percentile(baseline, 50.0);
  const double bg = geomean(baseline);
  if (b5 == 0.0 || b50 == 0.0 || bg == 0.0) {
    row.defined = false;
    return row;
  }
  row.p5 = 100.0 * (percentile(candidate, 5.0) / b5 - 1.0);
  row.median = 100.0 * (percentile(candidate, 50.0) / b50 - 1.0);
  row.geomean = 100.0 * (geomean(candidate) / bg - 1.0);
  return row;
}

}  // namespace deepsched
