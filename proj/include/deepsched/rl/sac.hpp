#pragma once

#include <optional>
#include <vector>

#include "deepsched/nn/adam.hpp"
#include "deepsched/nn/dense_net.hpp"
#include "deepsched/rl/replay.hpp"

namespace deepsched {

enum class SacVariant { sacd, dsacd };
enum class CriticLossMode { auto_select, mse, quantile_huber };

struct SacConfig {
  SacVariant variant = SacVariant::dsacd;
  int n_quantiles = 16; // forced to 1 for SACD
  double gamma = 0.0;
  double tau_target = 0.001;
  double beta = 0.999;
  double omega = 0.5;
  double eps_prio = 1e-6;
  double huber_k = 1.0;
  int batch = 32;
  float actor_lr = 1e-4f;
  float critic_lr = 1e-4f;
  double alpha_init = 0.1;
  double alpha_lr = 1e-4;
  size_t replay_capacity = 3000;
  int hidden_size = 32;
  int hidden_layers = 2;
  CriticLossMode critic_loss = CriticLossMode::auto_select;

  bool use_quantile_loss() const {
    if (critic_loss == CriticLossMode::auto_select) return variant == SacVariant::dsacd;
    return critic_loss == CriticLossMode::quantile_huber;
  }
  int quantiles() const { return variant == SacVariant::sacd ? 1 : n_quantiles; }
};

struct SacUpdateStats {
  bool updated = false;
  double critic_loss[2] = {0.0, 0.0};
  double policy_loss = 0.0;
  double alpha = 0.0;
  double max_abs_target_minus_reward = 0.0;
};

/// Soft actor-critic for discrete actions with twin (optionally quantile)
/// critics, soft targets, learned state-aware entropy and prioritized replay.
class SacAgent {
 public:
  /// `actor_branches`: one entry per decision branch (1L: N_RBG branches of
  /// |U|+1; 2L: a single branch).
  SacAgent(const SacConfig& cfg, int input_size, std::vector<int> actor_branches,
           std::uint64_t seed);

  /// Samples (or argmaxes) one action per branch from the masked policy.
  std::vector<int> act(const VecXf& state, const std::vector<ActionMask>& masks, Rng& rng,
                       bool deterministic);

  void observe(ExperienceTuple t) { store_.push(std::move(t)); }

  /// One Algorithm-2 update: critic step, policy step, entropy step, target
  /// soft-update, priority rewrite. No-op while the store holds < batch tuples.
  SacUpdateStats update(double omega_prime, Rng& rng);

  double alpha() const { return std::exp(log_alpha_); }
  const SacConfig& config() const { return cfg_; }
  DenseNet<float>& actor() { return actor_; }
  const DenseNet<float>& actor() const { return actor_; }
  DenseNet<float>& critic(int j) { return j == 0 ? critic1_ : critic2_; }
  DenseNet<float>& target(int j) { return j == 0 ? target1_ : target2_; }
  ReplayStore& store() { return store_; }
  AdamState<float>& actor_opt() { return actor_opt_; }
  AdamState<float>& critic_opt(int j) { return j == 0 ? critic1_opt_ : critic2_opt_; }

  /// Mean over quantiles of one critic's outputs for every action of a branch.
  VecXd mean_q(const VecXf& critic_out, int branch) const;

  int branch_offset(int branch) const { return branch_offsets_[branch]; }
  int branch_size(int branch) const { return actor_.branch_sizes()[branch]; }

  /// y = r + gamma * pi(s',a') (Qbar(s',a') - alpha log pi(s',a')), a' ~ pi;
  /// Qbar is the min over the target critics' quantile means.
  double critic_target(const ExperienceTuple& t, Rng& rng);

 private:
  SacConfig cfg_;
  DenseNet<float> actor_, critic1_, critic2_, target1_, target2_;
  AdamState<float> actor_opt_, critic1_opt_, critic2_opt_;
  double log_alpha_;
  ReplayStore store_;
  std::vector<int> branch_offsets_;
};

}  // namespace deepsched
