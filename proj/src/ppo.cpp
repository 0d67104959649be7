#include "deepsched/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

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

ActionMask concat_masks(const std::vector<ActionMask>& masks) {
  ActionMask full;
  for (const auto& m : masks) full.insert(full.end(), m.begin(), m.end());
  return full;
}

}  // namespace

PpoAgent::PpoAgent(const PpoConfig& cfg, int input_size, std::vector<int> branches,
                   std::uint64_t seed)
    : cfg_(cfg) {
  Rng rng(seed);
  int out = 0;
  for (int b : branches) out += b;
  actor_ = DenseNet<float>(net_sizes(input_size, cfg.hidden_size, cfg.hidden_layers, out),
                           branches, rng);
  critic_ = DenseNet<float>(net_sizes(input_size, cfg.hidden_size, cfg.hidden_layers, 1),
                            {1}, rng);
  actor_opt_.init(actor_, cfg.actor_lr);
  critic_opt_.init(critic_, cfg.critic_lr);
  jsd_opt_.init(actor_, cfg.jsd_lr);

  branch_offsets_.resize(branches.size());
  int off = 0;
  for (size_t i = 0; i < branches.size(); ++i) {
    branch_offsets_[i] = off;
    off += branches[i];
  }
}

PpoAgent::ActResult PpoAgent::act(const VecXf& state, const std::vector<ActionMask>& masks,
                                  Rng& rng, bool deterministic) {
  const auto& branches = actor_.branch_sizes();
  const ActionMask full = concat_masks(masks);
  const VecXd logits = actor_.forward(state).cast<double>();
  const VecXd probs = masked_softmax(logits, full, branches);

  ActResult out;
  out.actions.resize(branches.size());
  for (size_t b = 0; b < branches.size(); ++b) {
    const int off = branch_offsets_[b];
    const int a = deterministic ? argmax_branch(probs, full, off, branches[b])
                                : sample_branch(probs, full, off, branches[b], rng);
    out.actions[b] = a;
    out.logp += std::log(probs(off + a));
  }
  out.value = value_of(state);
  return out;
}

double PpoAgent::log_prob_of(const VecXf& state, const std::vector<ActionMask>& masks,
                             std::span<const int> actions) {
  const auto& branches = actor_.branch_sizes();
  const ActionMask full = concat_masks(masks);
  const VecXd logits = actor_.forward(state).cast<double>();
  const VecXd probs = masked_softmax(logits, full, branches);
  double logp = 0.0;
  for (size_t b = 0; b < branches.size(); ++b)
    logp += std::log(probs(branch_offsets_[b] + actions[b]));
  return logp;
}

double PpoAgent::value_of(const VecXf& state) {
  return static_cast<double>(critic_.forward(state)(0));
}

void PpoAgent::store_expert(ExpertEntry e) {
  if (expert_.size() < cfg_.expert_capacity) {
    expert_.push_back(std::move(e));
  } else {
    expert_[expert_next_] = std::move(e);
  }
  expert_next_ = (expert_next_ + 1) % cfg_.expert_capacity;
}

VecXf PpoAgent::smoothed_expert_onehot(int branch_size, int label) const {
  const float eta = static_cast<float>(cfg_.expert_smoothing);
  VecXf p = VecXf::Constant(branch_size, eta / branch_size);
  p(label) += 1.f - eta;
  return p;
}

PpoUpdateStats PpoAgent::update(Rng& rng) {
  if (!ready()) throw std::logic_error("PpoAgent::update: agent buffer below batch size");
  PpoUpdateStats stats;
  stats.updated = true;

  const size_t n = buffer_.size();
  const auto& branches = actor_.branch_sizes();

  // GAE over per-cell stage sequences (originals only; augmented copies reuse
  // their parent's advantage and return). All values were collected under the
  // same policy vintage; tails bootstrap with the same critic.
  std::vector<double> adv(n, 0.0), ret(n, 0.0);
  {
    std::map<int, std::vector<size_t>> per_cell;
    for (size_t i = 0; i < n; ++i)
      if (buffer_[i].parent < 0) per_cell[buffer_[i].cell].push_back(i);
    for (auto& [cell, idxs] : per_cell) {
      std::vector<double> rewards(idxs.size()), values(idxs.size());
      for (size_t k = 0; k < idxs.size(); ++k) {
        rewards[k] = buffer_[idxs[k]].reward;
        values[k] = buffer_[idxs[k]].value;
      }
      const double bootstrap = value_of(buffer_[idxs.back()].next_state);
      const GaeResult g = gae(rewards, values, bootstrap, cfg_.gamma, cfg_.gae_lambda);
      for (size_t k = 0; k < idxs.size(); ++k) {
        adv[idxs[k]] = g.advantages[k];
        ret[idxs[k]] = g.returns[k];
      }
    }
    for (size_t i = 0; i < n; ++i) {
      if (buffer_[i].parent >= 0) {
        adv[i] = adv[buffer_[i].parent];
        ret[i] = ret[buffer_[i].parent];
      }
    }
  }

  // One pass over the batch: value loss on the critic, clipped surrogate and
  // entropy bonus on the actor (L = L_value - L_policy - xi * L_entropy).
  actor_.zero_grads();
  critic_.zero_grads();
  double l_value = 0.0, l_policy = 0.0, l_entropy = 0.0;
  VecXf dlogits(actor_.output_size());
  const double inv_n = 1.0 / static_cast<double>(n);

  for (size_t i = 0; i < n; ++i) {
    const PpoTransition& t = buffer_[i];
    const ActionMask full = concat_masks(t.masks);

    const double v = value_of(t.state);
    l_value += 0.5 * (v - ret[i]) * (v - ret[i]) * inv_n;
    VecXf dv(1);
    dv(0) = static_cast<float>((v - ret[i]) * inv_n);
    critic_.backward(dv);

    const VecXf& logits = actor_.forward(t.state);
    const VecXf probs = masked_softmax(logits, full, branches);

    double logp_new = 0.0;
    for (size_t b = 0; b < branches.size(); ++b)
      logp_new += std::log(static_cast<double>(probs(branch_offsets_[b] + t.actions[b])));
    const double ratio = std::exp(logp_new - t.logp_old);
    const auto surr = clipped_surrogate(ratio, adv[i], cfg_.clip_eps);
    l_policy += surr.value * inv_n;

    double entropy = 0.0;
    for (size_t b = 0; b < branches.size(); ++b)
      entropy += branch_entropy(probs, full, branch_offsets_[b], branches[b]);
    l_entropy += entropy * inv_n;

    // Actor gradient of L = -(policy + xi * entropy); d logp/d logit is
    // one-hot minus probs over valid entries of each branch.
    dlogits.setZero();
    const double coeff = -surr.dlogp * inv_n;
    for (size_t b = 0; b < branches.size(); ++b) {
      const int off = branch_offsets_[b];
      const int chosen = off + t.actions[b];
      for (int k = 0; k < branches[b]; ++k) {
        if (!full[off + k]) continue;
        const float onehot = (off + k == chosen) ? 1.f : 0.f;
        dlogits(off + k) += static_cast<float>(coeff) * (onehot - probs(off + k));
      }
      branch_entropy_backward(probs, full, off, branches[b],
                              static_cast<float>(-cfg_.entropy_coef * inv_n), dlogits);
    }
    actor_.backward(dlogits);
  }

  adam_update(critic_, critic_opt_);
  adam_update(actor_, actor_opt_);

  stats.l_value = l_value;
  stats.l_policy = l_policy;
  stats.l_entropy = l_entropy;
  stats.l_total = l_value - l_policy - cfg_.entropy_coef * l_entropy;
  buffer_.clear();

  // Alternating step: JSD against expert labels.
  if (!expert_.empty()) {
    stats.jsd_step = true;
    stats.l_jsd = jsd_update(rng);
  }

  return stats;
}

double PpoAgent::jsd_update(Rng& rng) {
  if (expert_.empty()) return 0.0;
  const auto& branches = actor_.branch_sizes();
  actor_.zero_grads();
  double l_jsd = 0.0;
  VecXf dlogits(actor_.output_size());
  std::uniform_int_distribution<size_t> pick(0, expert_.size() - 1);
  const int bsz = cfg_.jsd_batch;
  for (int s = 0; s < bsz; ++s) {
    const ExpertEntry& e = expert_[pick(rng)];
    const ActionMask full = concat_masks(e.masks);
    const VecXf& logits = actor_.forward(e.state);
    const VecXf probs = masked_softmax(logits, full, branches);

    dlogits.setZero();
    const double scale = 1.0 / (bsz * static_cast<double>(branches.size()));
    for (size_t b = 0; b < branches.size(); ++b) {
      const int off = branch_offsets_[b];
      const VecXf pi = probs.segment(off, branches[b]);
      const VecXf expert = smoothed_expert_onehot(branches[b], e.labels[b]);
      l_jsd += static_cast<double>(jsd_base2(pi, expert)) * scale;
      VecXf dpi = jsd_base2_grad_p(pi, expert) * static_cast<float>(scale);
      VecXf dprob_full = VecXf::Zero(actor_.output_size());
      dprob_full.segment(off, branches[b]) = dpi;
      masked_softmax_backward(probs, full, off, branches[b], dprob_full, dlogits);
    }
    actor_.backward(dlogits);
  }
  adam_update(actor_, jsd_opt_);
  return l_jsd;
}

double PpoAgent::mean_jsd(std::span<const ExpertEntry> entries) {
  const auto& branches = actor_.branch_sizes();
  double acc = 0.0;
  for (const auto& e : entries) {
    const ActionMask full = concat_masks(e.masks);
    const VecXf& logits = actor_.forward(e.state);
    const VecXf probs = masked_softmax(logits, full, branches);
    double per = 0.0;
    for (size_t b = 0; b < branches.size(); ++b) {
      const VecXf pi = probs.segment(branch_offsets_[b], branches[b]);
      per += static_cast<double>(jsd_base2(pi, smoothed_expert_onehot(branches[b], e.labels[b])));
    }
    acc += per / static_cast<double>(branches.size());
  }
  return entries.empty() ? 0.0 : acc / static_cast<double>(entries.size());
}

}  // namespace deepsched
