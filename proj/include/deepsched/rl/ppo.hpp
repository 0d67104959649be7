#pragma once

#include <vector>

#include "deepsched/nn/adam.hpp"
#include "deepsched/nn/dense_net.hpp"

namespace deepsched {

struct PpoConfig {
  double gamma = 0.95;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double entropy_coef = 0.01; // xi
  double reward_scale_k = 0.2;
  int batch = 128;            // M, on-policy update size
  int jsd_batch = 128;        // b'
  size_t expert_capacity = 4000;
  double expert_smoothing = 1e-3; // eta, uniform mix into expert one-hots
  float actor_lr = 1e-4f;
  float critic_lr = 2e-4f;
  float jsd_lr = 1e-4f;
  int hidden_size = 32;
  int hidden_layers = 2;
};

/// One decision stage: for 1L the action vector covers every RBG branch of a
/// user layer; for 2L there is a single branch.
struct PpoTransition {
  VecXf state;
  VecXf next_state;
  std::vector<ActionMask> masks;
  std::vector<int> actions;
  double reward = 0.0;
  double logp_old = 0.0; // sum of chosen-action log-probs over branches
  double value = 0.0;
  int cell = 0;
  int parent = -1; // >= 0 for augmented copies: buffer index of the original
};

struct ExpertEntry {
  VecXf state;
  std::vector<ActionMask> masks;
  std::vector<int> labels; // expert action per branch
};

struct PpoUpdateStats {
  bool updated = false;
  double l_value = 0.0;
  double l_policy = 0.0;
  double l_entropy = 0.0;
  double l_total = 0.0;
  double l_jsd = 0.0;
  bool jsd_step = false;
};

/// PPO with a persistent expert-demonstration buffer and an alternating
/// JSD imitation step against the stored expert labels.
class PpoAgent {
 public:
  PpoAgent(const PpoConfig& cfg, int input_size, std::vector<int> branches, std::uint64_t seed);

  struct ActResult {
    std::vector<int> actions;
    double logp = 0.0;
    double value = 0.0;
  };
  ActResult act(const VecXf& state, const std::vector<ActionMask>& masks, Rng& rng,
                bool deterministic);

  /// Joint log-probability of a given action vector under the current policy
  /// (used when storing permuted training copies).
  double log_prob_of(const VecXf& state, const std::vector<ActionMask>& masks,
                     std::span<const int> actions);
  double value_of(const VecXf& state);

  void store(PpoTransition t) { buffer_.push_back(std::move(t)); }
  void store_expert(ExpertEntry e);
  bool ready() const { return buffer_.size() >= static_cast<size_t>(cfg_.batch); }
  size_t buffer_size() const { return buffer_.size(); }
  size_t expert_size() const { return expert_.size(); }

  /// One alternating-optimization update: a PPO step on the agent batch, then
  /// a JSD step on an expert mini-batch (skipped while the expert buffer is
  /// empty). Clears the agent buffer. Throws when the buffer holds fewer than
  /// `batch` transitions.
  PpoUpdateStats update(Rng& rng);

  /// The imitation half of the alternating optimization: one JSD step against
  /// a sampled expert mini-batch. Returns the batch JSD; no-op when the expert
  /// buffer is empty.
  double jsd_update(Rng& rng);

  /// Mean JSD of the current policy against stored expert labels (diagnostic).
  double mean_jsd(std::span<const ExpertEntry> entries);

  const PpoConfig& config() const { return cfg_; }
  DenseNet<float>& actor() { return actor_; }
  DenseNet<float>& critic() { return critic_; }
  AdamState<float>& actor_opt() { return actor_opt_; }
  AdamState<float>& critic_opt() { return critic_opt_; }
  AdamState<float>& jsd_opt() { return jsd_opt_; }
  int branch_offset(int b) const { return branch_offsets_[b]; }

  VecXf smoothed_expert_onehot(int branch_size, int label) const;

 private:
  PpoConfig cfg_;
  DenseNet<float> actor_, critic_;
  AdamState<float> actor_opt_, critic_opt_, jsd_opt_;
  std::vector<PpoTransition> buffer_;
  std::vector<ExpertEntry> expert_;
  size_t expert_next_ = 0;
  std::vector<int> branch_offsets_;
};

}  // namespace deepsched
