#include "deepsched/rl/sac.hpp"

#include <algorithm>
#include <cmath>

#include "deepsched/rl/losses.hpp"
#include "deepsched/rl/rewards.hpp"

namespace deepsched {

namespace {

std::vector<int> net_sizes(int input, int hidden, int n_hidden, int output) {
  std::vector<int> sizes{input};
  for (int i = 0; i < n_hidden; ++i) sizes.push_back(hidden);
  sizes.push_back(output);
  return sizes;
}

}  // namespace

SacAgent::SacAgent(const SacConfig& cfg, int input_size, std::vector<int> actor_branches,
                   std::uint64_t seed)
    : cfg_(cfg), log_alpha_(std::log(cfg.alpha_init)), store_(cfg.replay_capacity, cfg.omega) {
  Rng rng(seed);
  int actor_out = 0;
  for (int b : actor_branches) actor_out += b;
  actor_ = DenseNet<float>(net_sizes(input_size, cfg.hidden_size, cfg.hidden_layers, actor_out),
                           actor_branches, rng);
  const int n = cfg_.quantiles();
  std::vector<int> critic_branches;
  for (int b : actor_branches) critic_branches.push_back(b * n);
  critic1_ = DenseNet<float>(
      net_sizes(input_size, cfg.hidden_size, cfg.hidden_layers, actor_out * n), critic_branches,
      rng);
  critic2_ = DenseNet<float>(
      net_sizes(input_size, cfg.hidden_size, cfg.hidden_layers, actor_out * n), critic_branches,
      rng);
  target1_ = critic1_;
  target2_ = critic2_;
  actor_opt_.init(actor_, cfg.actor_lr);
  critic1_opt_.init(critic1_, cfg.critic_lr);
  critic2_opt_.init(critic2_, cfg.critic_lr);

  branch_offsets_.resize(actor_.branch_sizes().size());
  int off = 0;
  for (size_t i = 0; i < branch_offsets_.size(); ++i) {
    branch_offsets_[i] = off;
    off += actor_.branch_sizes()[i];
  }
}

std::vector<int> SacAgent::act(const VecXf& state, const std::vector<ActionMask>& masks, Rng& rng,
                               bool deterministic) {
  const auto& branches = actor_.branch_sizes();
  ActionMask full;
  full.reserve(actor_.output_size());
  for (const auto& m : masks) full.insert(full.end(), m.begin(), m.end());
  const VecXd logits = actor_.forward(state).cast<double>();
  const VecXd probs = masked_softmax(logits, full, branches);

  std::vector<int> actions(branches.size());
  for (size_t b = 0; b < branches.size(); ++b) {
    actions[b] = deterministic
                     ? argmax_branch(probs, full, branch_offsets_[b], branches[b])
                     : sample_branch(probs, full, branch_offsets_[b], branches[b], rng);
  }
  return actions;
}

VecXd SacAgent::mean_q(const VecXf& critic_out, int branch) const {
  const int n = cfg_.quantiles();
  const int bs = branch_size(branch);
  const int off = branch_offset(branch) * n;
  VecXd q(bs);
  for (int a = 0; a < bs; ++a) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += critic_out(off + a * n + i);
    q(a) = acc / n;
  }
  return q;
}

double SacAgent::critic_target(const ExperienceTuple& t, Rng& rng) {
  // y = r + gamma * pi(s',a') * (Qbar(s',a') - alpha log pi(s',a')), a' ~ pi.
  const int bs = branch_size(t.branch);
  const int off = branch_offset(t.branch);

  ActionMask full(actor_.output_size(), 1);
  for (int i = 0; i < bs; ++i) full[off + i] = t.next_mask[i];

  const VecXd logits = actor_.forward(t.next_state).cast<double>();
  const VecXd probs = masked_softmax(logits, full, actor_.branch_sizes());
  const int a_next = sample_branch(probs, full, off, bs, rng);

  const double q1 = mean_q(target1_.forward(t.next_state), t.branch)(a_next);
  const double q2 = mean_q(target2_.forward(t.next_state), t.branch)(a_next);
  const double q_bar = std::min(q1, q2);
  const double pi = probs(off + a_next);
  return static_cast<double>(t.reward) + cfg_.gamma * pi * (q_bar - alpha() * std::log(pi));
}

SacUpdateStats SacAgent::update(double omega_prime, Rng& rng) {
  SacUpdateStats stats;
  if (store_.size() < static_cast<size_t>(cfg_.batch)) return stats;
  stats.updated = true;

  const int b = cfg_.batch;
  const int n = cfg_.quantiles();
  const auto taus = quantile_levels<float>(n);
  const PerBatch batch = per_sample(store_, b, omega_prime, rng);

  std::vector<double> targets(b);
  for (int i = 0; i < b; ++i) {
    const ExperienceTuple& t = store_.tuple(batch.indices[i]);
    targets[i] = critic_target(t, rng);
    stats.max_abs_target_minus_reward =
        std::max(stats.max_abs_target_minus_reward,
                 std::abs(targets[i] - static_cast<double>(t.reward)));
  }

  // Critic step; TD errors kept for the priority rewrite.
  std::vector<std::vector<double>> td_errors(b);
  const bool quantile_loss = cfg_.use_quantile_loss();

  for (int j = 0; j < 2; ++j) {
    DenseNet<float>& critic = j == 0 ? critic1_ : critic2_;
    critic.zero_grads();
    double loss = 0.0;
    VecXf dlogits(critic.output_size());
    std::vector<float> q_slice(n), dq(n);
    for (int i = 0; i < b; ++i) {
      const ExperienceTuple& t = store_.tuple(batch.indices[i]);
      const float scale = static_cast<float>(batch.weights[i] / (b * n));
      const VecXf& out = critic.forward(t.state);
      const int slice = (branch_offset(t.branch) + t.action) * n;
      for (int qn = 0; qn < n; ++qn) q_slice[qn] = out(slice + qn);
      std::fill(dq.begin(), dq.end(), 0.f);
      loss += critic_slice_loss<float>(q_slice, static_cast<float>(targets[i]), taus,
                                       static_cast<float>(cfg_.huber_k), scale, quantile_loss, dq,
                                       &td_errors[i]);
      dlogits.setZero();
      for (int qn = 0; qn < n; ++qn) dlogits(slice + qn) = dq[qn];
      critic.backward(dlogits);
    }
    stats.critic_loss[j] = loss;
    adam_update(critic, j == 0 ? critic1_opt_ : critic2_opt_);
  }

  // Policy step: Eq. 14 over every action probability of the state (all
  // branches of a 1L output), with the tuple's importance weight.
  {
    actor_.zero_grads();
    double loss = 0.0;
    VecXf dlogits(actor_.output_size());
    const float a_coef = static_cast<float>(alpha());
    const int n_branches = static_cast<int>(actor_.branch_sizes().size());
    for (int i = 0; i < b; ++i) {
      const ExperienceTuple& t = store_.tuple(batch.indices[i]);
      const ActionMask& full =
          t.full_mask.size() == static_cast<size_t>(actor_.output_size()) ? t.full_mask
                                                                          : t.mask;

      const VecXf& c1 = critic1_.forward(t.state);
      const VecXf& c2 = critic2_.forward(t.state);
      const VecXf& logits = actor_.forward(t.state);
      const VecXf probs = masked_softmax(logits, full, actor_.branch_sizes());

      dlogits.setZero();
      for (int br = 0; br < n_branches; ++br) {
        const VecXf q_min =
            mean_q(c1, br).cwiseMin(mean_q(c2, br)).cast<float>();
        loss += sac_policy_objective<float>(probs, full, branch_offset(br), branch_size(br),
                                            q_min, a_coef,
                                            static_cast<float>(batch.weights[i] / b), dlogits);
      }
      actor_.backward(dlogits);
    }
    stats.policy_loss = loss;
    adam_update(actor_, actor_opt_);
  }

  // Entropy step on log(alpha).
  {
    double grad = 0.0;
    for (int i = 0; i < b; ++i) {
      const ExperienceTuple& t = store_.tuple(batch.indices[i]);
      const int bs = branch_size(t.branch);
      const int off = branch_offset(t.branch);
      const int n_valid = valid_action_count(t.mask);
      const double h_bar = entropy_target(n_valid, cfg_.beta);

      ActionMask full(actor_.output_size(), 1);
      for (int k = 0; k < bs; ++k) full[off + k] = t.mask[k];
      const VecXf& logits = actor_.forward(t.state);
      const VecXf probs = masked_softmax(logits, full, actor_.branch_sizes());

      grad += batch.weights[i] *
              static_cast<double>(alpha_gradient<float>(probs, full, off, bs, n_valid,
                                                        static_cast<float>(h_bar))) /
              b;
    }
    log_alpha_ -= cfg_.alpha_lr * alpha() * grad;
  }

  soft_update(target1_, critic1_, static_cast<float>(cfg_.tau_target));
  soft_update(target2_, critic2_, static_cast<float>(cfg_.tau_target));

  for (int i = 0; i < b; ++i)
    store_.set_priority(batch.indices[i], per_priority(td_errors[i], cfg_.eps_prio));

  stats.alpha = alpha();
  return stats;
}

}  // namespace deepsched
