#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "deepsched/common.hpp"

namespace deepsched {

/// One off-policy experience: the decision state, the branch it was taken on,
/// the action, the normalized reward, the successor state, and both masks.
struct ExperienceTuple {
  VecXf state;
  VecXf next_state;
  int branch = 0;
  int action = 0;
  float reward = 0.f;
  ActionMask mask;      // the acting branch's validity
  ActionMask next_mask;
  ActionMask full_mask; // whole-state masks (all branches); policy step spans them
};

/// Priority of one transition from its per-critic per-quantile TD errors:
/// delta = mean |x| + eps.
inline double per_priority(std::span<const double> td_errors, double eps_prio) {
  double acc = 0.0;
  for (double x : td_errors) acc += std::abs(x);
  return acc / static_cast<double>(td_errors.empty() ? 1 : td_errors.size()) + eps_prio;
}

/// FIFO replay memory with proportional sampling over delta^omega via a sum
/// tree (O(log n) draws and priority updates).
class ReplayStore {
 public:
  ReplayStore(size_t capacity, double omega) : capacity_(capacity), omega_(omega) {
    if (capacity == 0) throw std::invalid_argument("ReplayStore: zero capacity");
    leaf_base_ = 1;
    while (leaf_base_ < capacity) leaf_base_ *= 2;
    tree_.assign(2 * leaf_base_, 0.0);
    delta_.assign(capacity, 0.0);
  }

  size_t size() const { return size_; }
  size_t capacity() const { return capacity_; }
  double omega() const { return omega_; }
  double total_mass() const { return tree_[1]; }

  const ExperienceTuple& tuple(size_t idx) const { return tuples_[idx]; }
  double priority(size_t idx) const { return delta_[idx]; }

  /// Inserts with the current maximum priority so fresh tuples get sampled.
  void push(ExperienceTuple t) {
    const double delta = size_ == 0 ? 1.0 : max_delta_;
    const size_t idx = next_;
    if (size_ < capacity_) {
      tuples_.push_back(std::move(t));
      ++size_;
    } else {
      tuples_[idx] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
    set_priority(idx, delta);
  }

  void set_priority(size_t idx, double delta) {
    if (idx >= size_) throw std::out_of_range("ReplayStore::set_priority");
    delta_[idx] = delta;
    max_delta_ = std::max(max_delta_, delta);
    size_t node = idx + leaf_base_;
    tree_[node] = std::pow(delta, omega_);
    for (node /= 2; node >= 1; node /= 2) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }

  /// P(i) = delta_i^omega / sum_k delta_k^omega.
  double sample_probability(size_t idx) const {
    return tree_[idx + leaf_base_] / tree_[1];
  }

  /// One proportional draw.
  size_t sample_index(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, tree_[1]);
    double u = unif(rng);
    size_t node = 1;
    while (node < leaf_base_) {
      const double left = tree_[2 * node];
      if (u < left) {
        node = 2 * node;
      } else {
        u -= left;
        node = 2 * node + 1;
      }
    }
    size_t idx = node - leaf_base_;
    if (idx >= size_) idx = size_ - 1; // numeric edge at the total mass boundary
    return idx;
  }

 private:
  size_t capacity_;
  double omega_;
  size_t leaf_base_ = 1;
  size_t size_ = 0;
  size_t next_ = 0;
  double max_delta_ = 0.0;
  std::vector<double> tree_;
  std::vector<double> delta_;
  std::vector<ExperienceTuple> tuples_;
};

struct PerBatch {
  std::vector<size_t> indices;
  std::vector<double> weights; // importance weights, normalized by the batch max
};

/// Draws b tuples proportionally to delta^omega and computes importance
/// weights w_i = (|D| P(i))^{-omega'}, divided by the batch maximum.
inline PerBatch per_sample(const ReplayStore& store, int batch, double omega_prime, Rng& rng) {
  if (store.size() < static_cast<size_t>(batch))
    throw std::invalid_argument("per_sample: store underfilled");
  PerBatch out;
  out.indices.resize(batch);
  out.weights.resize(batch);
  double max_w = 0.0;
  for (int i = 0; i < batch; ++i) {
    const size_t idx = store.sample_index(rng);
    out.indices[i] = idx;
    const double p = store.sample_probability(idx);
    out.weights[i] = std::pow(static_cast<double>(store.size()) * p, -omega_prime);
    max_w = std::max(max_w, out.weights[i]);
  }
  if (max_w > 0.0)
    for (double& w : out.weights) w /= max_w;
  return out;
}

}  // namespace deepsched
