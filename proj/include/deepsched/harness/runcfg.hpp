#pragma once

#include <string>

#include "deepsched/sim/config.hpp"

namespace deepsched {

/// Training knobs, grouped with the system parameters into one flat config.
struct TrainConfig {
  // On-policy.
  double ppo_discount = 0.95;
  double gae_lambda = 0.95;
  double ppo_clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double reward_scaling_k = 0.2;
  int ppo_batch_size = 128;
  int jsd_batch_size = 128;
  int expert_buffer_size = 4000;
  double expert_smoothing = 1e-3;
  double ppo_actor_lr = 1e-4;
  double ppo_critic_lr = 2e-4;
  double jsd_lr = 1e-3; // lambda_JSD

  // Off-policy.
  double sac_discount = 0.0;
  int sac_batch_size = 32;
  double sac_actor_lr = 1e-4;
  double sac_critic_lr = 1e-4;
  int critic_quantiles = 16;
  double prioritized_replay_omega = 0.5;
  double per_epsilon = 1e-6;
  double target_smoothing_coef = 0.001;
  double target_entropy_beta_1l = 0.999;
  double target_entropy_beta_2l = 0.4;
  double alpha_init = 0.25;
  double alpha_lr = 1e-4;
  int replay_buffer_per_cell = 1000;
  double omega_prime_start = 0.4;
  double omega_prime_end = 1.0;
  int sac_updates_per_tti = 0; // 0: one epoch per sample (tuples per TTI / batch)
  int jsd_steps_per_update = 1;

  // Shared.
  int hidden_layers = 2;
  int hidden_layer_size = 32;
  int train_ttis = 2000;
  int eval_ttis = 600;
  int augmentation_copies = 1; // N_Pi
  int curve_window = 100;
};

struct RunConfig {
  SimConfig sim;
  TrainConfig train;
};

RunConfig default_run_config();

/// Flat `key = value` document; '#' starts a comment. Unknown keys throw.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string run_config_to_string(const RunConfig& cfg);

}  // namespace deepsched
