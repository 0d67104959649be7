#pragma once

#include <optional>
#include <span>
#include <vector>

namespace deepsched {

/// Geometric mean with zero-valued entries replaced by one (bit/s) before the
/// product; computed in log space.
double geomean(std::span<const double> values);

/// Percentile with linear interpolation between closest ranks
/// (h = (n-1) q/100, 0-indexed). q in [0, 100]; throws on empty input.
double percentile(std::span<const double> values, double q);

/// User-perceived throughput: served bits over busy time. nullopt when the UE
/// was never busy (excluded from distributions).
std::optional<double> upt(double served_bits, long long busy_ttis, double tti_duration_s);

/// Accumulates occupied-layer counts per occupied RBG across a run.
struct CoschedAccumulator {
  long long occupied_rbgs = 0;
  long long occupied_layers = 0;

  void add(int layers_on_rbg) {
    if (layers_on_rbg <= 0) return;
    occupied_rbgs += 1;
    occupied_layers += layers_on_rbg;
  }
  /// Mean occupied layers per occupied RBG; 1.0 <= value <= |L|.
  double efficiency() const {
    return occupied_rbgs == 0 ? 0.0
                              : static_cast<double>(occupied_layers) / occupied_rbgs;
  }
};

struct GainRow {
  double p5 = 0.0;
  double median = 0.0;
  double geomean = 0.0;
  bool defined = true;
};

/// Percentage gains 100*(candidate/baseline - 1) at the 5th percentile, the
/// median and the geomean. Undefined (not infinite) when a baseline stat is 0.
GainRow gain_table(std::span<const double> candidate, std::span<const double> baseline);

}  // namespace deepsched
