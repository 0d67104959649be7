#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace deepsched {

/// On-policy reward for RBG m at user layer l (0-based): P*v at the first
/// layer, k*v above, with P = G / G_max.
inline double reward_ppo(double geomean, double geomean_max, int v, int layer, double k) {
  if (!(geomean_max > 0.0)) throw std::invalid_argument("reward_ppo: G_max must be > 0");
  const double p = geomean / geomean_max;
  return (layer == 0 ? p : k) * static_cast<double>(v);
}

/// Off-policy raw reward: T_l / R at the first layer, the marginal PF
/// increment (T_l - T_{l-1}) / R above it.
inline double reward_raw(double rate_l, double rate_prev, double r_u, int layer) {
  const double r = std::max(r_u, 1.0);
  return layer == 0 ? rate_l / r : (rate_l - rate_prev) / r;
}

/// Per-TTI reward normalization over one decision group: divide by the max raw
/// reward when positive (clip at -1); otherwise no-allocation earns 1 and any
/// allocating action -1. `no_alloc[i]` flags decisions that chose no user.
inline std::vector<double> reward_normalize(std::span<const double> raw,
                                            std::span<const std::uint8_t> no_alloc) {
  if (raw.size() != no_alloc.size())
    throw std::invalid_argument("reward_normalize: size mismatch");
  std::vector<double> out(raw.size());
  double max_alloc = -std::numeric_limits<double>::infinity();
  bool any_alloc = false;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (no_alloc[i]) continue;
    any_alloc = true;
    max_alloc = std::max(max_alloc, raw[i]);
  }
  const bool positive = any_alloc && max_alloc > 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (positive)
      out[i] = std::max(raw[i] / max_alloc, -1.0);
    else
      out[i] = no_alloc[i] ? 1.0 : -1.0;
  }
  return out;
}

/// State-specific entropy target H_bar(s) = -beta * log(1/|A(s)|), natural log.
inline double entropy_target(int n_valid_actions, double beta) {
  if (n_valid_actions < 1) throw std::invalid_argument("entropy_target: |A(s)| must be >= 1");
  return -beta * std::log(1.0 / n_valid_actions);
}

/// Generalized advantage estimation over one trajectory segment.
/// `bootstrap` is V(s_{T+1}); returns are advantages + values.
struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

inline GaeResult gae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap, double gamma, double lambda) {
  if (rewards.size() != values.size()) throw std::invalid_argument("gae: size mismatch");
  const size_t n = rewards.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double running = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double next_v = (i + 1 < n) ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * next_v - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

}  // namespace deepsched
