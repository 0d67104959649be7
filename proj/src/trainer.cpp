#include "deepsched/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "deepsched/harness/agent_io.hpp"
#include "deepsched/kpi/kpi.hpp"
#include "deepsched/rl/ppo.hpp"
#include "deepsched/rl/rewards.hpp"
#include "deepsched/rl/sac.hpp"
#include "deepsched/sched/heuristics.hpp"

namespace deepsched {

namespace {

struct PendingSac {
  ExperienceTuple t;
  int rbg = 0;
  bool has_next = false;
  bool has_reward = false;
};

struct PendingPpo {
  PpoTransition t;
  int layer = 0;
  std::vector<int> v_per_rbg; // +1/-1 per branch decision
  std::vector<SlotPermutation> aug_perms;
  std::vector<double> aug_logp;
  std::vector<double> aug_value;
  bool has_next = false;
  bool has_reward = false;
};

class Trainer {
 public:
  Trainer(const RunConfig& cfg, const TrainOptions& opt)
      : cfg_(cfg),
        opt_(opt),
        one_loop_(opt.arch == "1l"),
        state_(init_sim(cfg.sim)),
        agent_rng_(cfg.sim.seed * 0x2545f4914f6cdd1dULL + 7),
        aug_rng_(cfg.sim.seed * 0x27d4eb2f165667c5ULL + 11) {
    if (opt.arch != "1l" && opt.arch != "2l")
      throw std::invalid_argument("train: arch must be 1l or 2l");
    const SimConfig& sim = cfg.sim;
    const int branch = actions_per_branch(sim.max_candidates);

    if (opt.algo == "ppo") {
      PpoConfig pc;
      pc.gamma = cfg.train.ppo_discount;
      pc.gae_lambda = cfg.train.gae_lambda;
      pc.clip_eps = cfg.train.ppo_clip_epsilon;
      pc.entropy_coef = cfg.train.entropy_coef;
      pc.reward_scale_k = cfg.train.reward_scaling_k;
      pc.batch = cfg.train.ppo_batch_size;
      pc.jsd_batch = cfg.train.jsd_batch_size;
      pc.expert_capacity = static_cast<size_t>(cfg.train.expert_buffer_size);
      pc.expert_smoothing = cfg.train.expert_smoothing;
      pc.actor_lr = static_cast<float>(cfg.train.ppo_actor_lr);
      pc.critic_lr = static_cast<float>(cfg.train.ppo_critic_lr);
      pc.jsd_lr = static_cast<float>(cfg.train.jsd_lr);
      pc.hidden_size = cfg.train.hidden_layer_size;
      pc.hidden_layers = cfg.train.hidden_layers;
      std::vector<int> branches =
          one_loop_ ? std::vector<int>(sim.n_rbg, branch) : std::vector<int>{branch};
      ppo_.emplace(pc, input_size(), branches, sim.seed + 101);
    } else if (opt.algo == "sacd" || opt.algo == "dsacd") {
      SacConfig sc;
      sc.variant = opt.algo == "sacd" ? SacVariant::sacd : SacVariant::dsacd;
      sc.n_quantiles = cfg.train.critic_quantiles;
      sc.gamma = cfg.train.sac_discount;
      sc.tau_target = cfg.train.target_smoothing_coef;
      sc.beta = one_loop_ ? cfg.train.target_entropy_beta_1l : cfg.train.target_entropy_beta_2l;
      sc.omega = cfg.train.prioritized_replay_omega;
      sc.eps_prio = cfg.train.per_epsilon;
      sc.batch = cfg.train.sac_batch_size;
      sc.actor_lr = static_cast<float>(cfg.train.sac_actor_lr);
      sc.critic_lr = static_cast<float>(cfg.train.sac_critic_lr);
      sc.alpha_init = cfg.train.alpha_init;
      sc.alpha_lr = cfg.train.alpha_lr;
      sc.replay_capacity = static_cast<size_t>(cfg.train.replay_buffer_per_cell) * sim.n_cells;
      sc.hidden_size = cfg.train.hidden_layer_size;
      sc.hidden_layers = cfg.train.hidden_layers;
      std::vector<int> branches =
          one_loop_ ? std::vector<int>(sim.n_rbg, branch) : std::vector<int>{branch};
      sac_.emplace(sc, input_size(), branches, sim.seed + 211);
    } else {
      throw std::invalid_argument("train: unknown algo '" + opt.algo + "'");
    }

    sac_pending_.resize(sim.n_cells);
    ppo_pending_.resize(sim.n_cells);
  }

  TrainResult run() {
    const SimConfig& sim = cfg_.sim;
    std::ofstream curve;
    if (!opt_.out_dir.empty()) {
      std::filesystem::create_directories(opt_.out_dir);
      curve.open(opt_.out_dir + "/curve_" + opt_.algo + "_" + opt_.arch + ".csv");
      curve << (ppo_ ? "tti,geomean_bps,windowed_geomean_bps,l_value,l_policy,l_entropy,l_jsd\n"
                     : "tti,geomean_bps,windowed_geomean_bps,critic1,critic2,policy,alpha\n");
    }

    const int total = sim.warmup_ttis + cfg_.train.train_ttis;
    const int checkpoint_every = std::max(1, cfg_.train.train_ttis / 4);
    const std::string ckpt_path =
        opt_.out_dir.empty()
            ? std::string()
            : opt_.out_dir + "/checkpoint_" + opt_.algo + "_" + opt_.arch + ".bin";
    for (int t = 0; t < total; ++t) {
      const auto tti_stats = run_tti();
      if (state_.tti <= sim.warmup_ttis) continue;
      if (!ckpt_path.empty() &&
          (state_.tti - sim.warmup_ttis) % checkpoint_every == 0)
        save_checkpoint(ckpt_path);

      result_.tti_geomean.push_back(tti_stats.geomean);
      window_.push_back(tti_stats.geomean);
      if (static_cast<int>(window_.size()) > cfg_.train.curve_window) window_.erase(window_.begin());
      double wmean = 0.0;
      for (double g : window_) wmean += g;
      wmean /= static_cast<double>(window_.size());
      result_.windowed_geomean.push_back(wmean);

      if (curve.is_open()) {
        char line[256];
        if (ppo_)
          std::snprintf(line, sizeof line, "%lld,%.6f,%.6f,%.6g,%.6g,%.6g,%.6g\n", state_.tti,
                        tti_stats.geomean, wmean, ppo_stats_.l_value, ppo_stats_.l_policy,
                        ppo_stats_.l_entropy, ppo_stats_.l_jsd);
        else
          std::snprintf(line, sizeof line, "%lld,%.6f,%.6f,%.6g,%.6g,%.6g,%.6g\n", state_.tti,
                        tti_stats.geomean, wmean, sac_stats_.critic_loss[0],
                        sac_stats_.critic_loss[1], sac_stats_.policy_loss, sac_stats_.alpha);
        curve << line;
      }
    }

    if (!ckpt_path.empty()) {
      result_.checkpoint_path = ckpt_path;
      save_checkpoint(ckpt_path);
    }
    result_.final_alpha = sac_ ? sac_->alpha() : 0.0;
    return result_;
  }

  void save_checkpoint(const std::string& path) {
    AgentCheckpoint ckpt;
    ckpt.algo = opt_.algo;
    ckpt.arch = opt_.arch;
    ckpt.max_candidates = cfg_.sim.max_candidates;
    ckpt.n_rbg = cfg_.sim.n_rbg;
    ckpt.max_layers = cfg_.sim.max_layers;
    if (ppo_) {
      ckpt.nets["actor"] = serialize(ppo_->actor());
      ckpt.nets["critic"] = serialize(ppo_->critic());
      ckpt.optimizers["actor"] = serialize_adam(ppo_->actor_opt());
      ckpt.optimizers["critic"] = serialize_adam(ppo_->critic_opt());
      ckpt.optimizers["jsd"] = serialize_adam(ppo_->jsd_opt());
    } else {
      ckpt.nets["actor"] = serialize(sac_->actor());
      ckpt.nets["critic1"] = serialize(sac_->critic(0));
      ckpt.nets["critic2"] = serialize(sac_->critic(1));
      ckpt.nets["target1"] = serialize(sac_->target(0));
      ckpt.nets["target2"] = serialize(sac_->target(1));
      ckpt.scalars["log_alpha"] = std::log(sac_->alpha());
      ckpt.optimizers["actor"] = serialize_adam(sac_->actor_opt());
      ckpt.optimizers["critic1"] = serialize_adam(sac_->critic_opt(0));
      ckpt.optimizers["critic2"] = serialize_adam(sac_->critic_opt(1));
    }
    save_agent_checkpoint(ckpt, path);
  }

 private:
  int input_size() const {
    return one_loop_ ? state_size_1l(cfg_.sim.max_candidates, cfg_.sim.n_rbg)
                     : state_size_2l(cfg_.sim.max_candidates);
  }

  bool emitting() const { return state_.tti >= cfg_.sim.warmup_ttis; }

  struct TtiStats {
    double geomean = 0.0;
  };

  TtiStats run_tti() {
    const SimConfig& sim = cfg_.sim;
    const bool emit_this_tti = emitting();
    if (emit_this_tti) result_.emitting_ttis += 1;
    advance_channel(state_);
    generate_traffic(state_);

    AllocationGrid grid(sim.n_cells, sim.n_rbg, sim.max_layers);
    std::vector<std::vector<int>> cands(sim.n_cells);
    for (int c = 0; c < sim.n_cells; ++c) cands[c] = td_select(state_, c, sim.max_candidates);

    for (int l = 0; l < sim.max_layers; ++l) {
      for (int c = 0; c < sim.n_cells; ++c) {
        LayerContext ctx{&state_, &grid, c, l, cands[c]};
        if (one_loop_)
          collect_layer_1l(ctx, grid);
        else
          collect_layer_2l(ctx, grid);
      }
    }

    const TtiOutcome outcome = apply_allocation(state_, grid);

    // Per-cell TTI geomean feeds the on-policy reward; the global one feeds
    // the training curve.
    std::vector<double> all_tput;
    for (int c = 0; c < sim.n_cells; ++c) {
      std::vector<double> cell_tput(outcome.inst_tput[c].data(),
                                    outcome.inst_tput[c].data() + sim.n_ues_per_cell);
      const double g = geomean(cell_tput);
      g_max_ = std::max(g_max_, g);
      if (!sac_) finalize_ppo_rewards(c, g);
      all_tput.insert(all_tput.end(), cell_tput.begin(), cell_tput.end());
    }

    run_updates(emit_this_tti);

    TtiStats stats;
    stats.geomean = geomean(all_tput);
    return stats;
  }

  // PF sum of an RBG's member set, mutual interference applied.
  double rbg_pf_sum(int cell, int rbg, const std::vector<int>& members) const {
    double sum = 0.0;
    for (int u : members)
      sum += estimate_rate(state_, cell, u, rbg, members) /
             std::max(state_.ue(cell, u).smoothed_tput, 1.0);
    return sum;
  }

  // Eq. 20 applied per decision: each valid candidate's raw reward is the PF
  // increment it would add to this RBG (its marginal PF-sum change, expressed
  // through the T/R form of the raw-reward op); the chosen action's reward is
  // normalized against the best of them.
  double decision_reward(const LayerContext& ctx, const AllocationGrid& grid, int rbg,
                         int chosen, const ActionMask& mask) {
    const int u_max = cfg_.sim.max_candidates;
    const auto incumbents = grid.scheduled_below(ctx.cell, rbg, ctx.layer);
    const double pf_before = rbg_pf_sum(ctx.cell, rbg, incumbents);
    std::vector<double> raws;
    std::vector<std::uint8_t> noal;
    int chosen_idx = -1;
    for (int a = 0; a <= u_max; ++a) {
      if (!mask[a]) continue;
      double raw = 0.0;
      bool is_noalloc = true;
      if (a < static_cast<int>(ctx.candidates.size())) {
        const int ue = ctx.candidates[a];
        std::vector<int> with = incumbents;
        with.push_back(ue);
        const double r_u = std::max(state_.ue(ctx.cell, ue).smoothed_tput, 1.0);
        raw = reward_raw(rbg_pf_sum(ctx.cell, rbg, with) * r_u, pf_before * r_u,
                         state_.ue(ctx.cell, ue).smoothed_tput, ctx.layer);
        is_noalloc = false;
      }
      if (a == chosen) chosen_idx = static_cast<int>(raws.size());
      raws.push_back(raw);
      noal.push_back(is_noalloc ? 1 : 0);
    }
    const auto normalized = reward_normalize(raws, noal);
    return normalized[chosen_idx];
  }

  // ---- 1L collection: one decision stage per (cell, layer). ----

  void collect_layer_1l(const LayerContext& ctx, AllocationGrid& grid) {
    const SimConfig& sim = cfg_.sim;
    StateBundle1L bundle = build_state_1l(ctx);
    fill_pending_next_1l(ctx.cell, bundle);

    std::vector<int> actions;
    double logp = 0.0, value = 0.0;
    if (ppo_) {
      auto res = ppo_->act(bundle.x, bundle.masks, agent_rng_, false);
      actions = std::move(res.actions);
      logp = res.logp;
      value = res.value;
    } else {
      actions = sac_->act(bundle.x, bundle.masks, agent_rng_, false);
    }

    // Rewards per RBG decision under the pre-assignment incumbents.
    std::vector<double> reward(sim.n_rbg, 0.0);
    std::vector<int> v_per_rbg(sim.n_rbg, 1);
    for (int m = 0; m < sim.n_rbg; ++m) {
      const int a = actions[m];
      v_per_rbg[m] = better_choice_exists(ctx, m, a, bundle.masks[m]);
      if (sac_ && emitting()) reward[m] = decision_reward(ctx, grid, m, a, bundle.masks[m]);
      if (a < static_cast<int>(ctx.candidates.size()))
        grid.assign(ctx.cell, m, ctx.layer, ctx.candidates[a]);
    }

    if (!emitting()) return;

    if (sac_) {
      ActionMask full;
      for (const auto& bm : bundle.masks) full.insert(full.end(), bm.begin(), bm.end());
      for (int m = 0; m < sim.n_rbg; ++m) {
        PendingSac p;
        p.t.state = bundle.x;
        p.t.branch = m;
        p.t.action = actions[m];
        p.t.mask = bundle.masks[m];
        p.t.full_mask = full;
        p.t.reward = static_cast<float>(reward[m]);
        p.has_reward = true;
        sac_pending_[ctx.cell].push_back(std::move(p));
        result_.tuples_recorded += 1;
      }
    } else {
      PendingPpo p;
      p.t.state = bundle.x;
      p.t.masks = bundle.masks;
      p.t.actions = actions;
      p.t.logp_old = logp;
      p.t.value = value;
      p.t.cell = ctx.cell;
      p.layer = ctx.layer;
      p.v_per_rbg = v_per_rbg;
      prepare_ppo_augmentation(p, 0);
      store_expert_labels(ctx, bundle);
      ppo_pending_[ctx.cell].push_back(std::move(p));
    }
  }

  // ---- 2L collection: one decision per (cell, layer, RBG). ----

  void collect_layer_2l(const LayerContext& ctx, AllocationGrid& grid) {
    const SimConfig& sim = cfg_.sim;
    for (int m = 0; m < sim.n_rbg; ++m) {
      StateBundle2L bundle = build_state_2l(ctx, m);
      fill_pending_next_2l(ctx.cell, m, bundle);

      int action;
      double logp = 0.0, value = 0.0;
      if (ppo_) {
        auto res = ppo_->act(bundle.x, {bundle.mask}, agent_rng_, false);
        action = res.actions[0];
        logp = res.logp;
        value = res.value;
      } else {
        action = sac_->act(bundle.x, {bundle.mask}, agent_rng_, false)[0];
      }

      const int v = better_choice_exists(ctx, m, action, bundle.mask);
      double reward = 0.0;
      if (sac_ && emitting()) reward = decision_reward(ctx, grid, m, action, bundle.mask);
      if (action < static_cast<int>(ctx.candidates.size()))
        grid.assign(ctx.cell, m, ctx.layer, ctx.candidates[action]);

      if (!emitting()) continue;

      if (sac_) {
        PendingSac p;
        p.t.state = bundle.x;
        p.t.branch = 0;
        p.t.action = action;
        p.t.mask = bundle.mask;
        p.t.full_mask = bundle.mask;
        p.rbg = m;
        p.t.reward = static_cast<float>(reward);
        p.has_reward = true;
        sac_pending_[ctx.cell].push_back(std::move(p));
        result_.tuples_recorded += 1;
      } else {
        PendingPpo p;
        p.t.state = bundle.x;
        p.t.masks = {bundle.mask};
        p.t.actions = {action};
        p.t.logp_old = logp;
        p.t.value = value;
        p.t.cell = ctx.cell;
        p.layer = ctx.layer;
        p.v_per_rbg = {v};
        prepare_ppo_augmentation(p, 1);
        store_expert_labels_2l(ctx, m, bundle);
        ppo_pending_[ctx.cell].push_back(std::move(p));
      }
    }
  }

  // ---- Pending plumbing: successor states and commits. ----

  void fill_pending_next_1l(int cell, const StateBundle1L& bundle) {
    if (sac_) {
      for (auto& p : sac_pending_[cell]) {
        if (p.has_next) continue;
        p.t.next_state = bundle.x;
        p.t.next_mask = bundle.masks[p.t.branch];
        p.has_next = true;
      }
      try_commit_sac(cell);
    } else {
      fill_ppo_next(cell, bundle.x);
    }
  }

  void fill_pending_next_2l(int cell, int rbg, const StateBundle2L& bundle) {
    if (sac_) {
      for (auto& p : sac_pending_[cell]) {
        if (p.has_next || p.rbg != rbg) continue;
        p.t.next_state = bundle.x;
        p.t.next_mask = bundle.mask;
        p.has_next = true;
      }
      try_commit_sac(cell);
    } else {
      fill_ppo_next(cell, bundle.x);
    }
  }

  void try_commit_sac(int cell) {
    auto& pend = sac_pending_[cell];
    size_t keep = 0;
    for (size_t i = 0; i < pend.size(); ++i) {
      if (pend[i].has_next && pend[i].has_reward) {
        commit_sac(pend[i]);
      } else {
        if (keep != i) pend[keep] = std::move(pend[i]);
        ++keep;
      }
    }
    pend.resize(keep);
  }

  void fill_ppo_next(int cell, const VecXf& x) {
    for (auto& p : ppo_pending_[cell]) {
      if (p.has_next) continue;
      p.t.next_state = x;
      p.has_next = true;
    }
    try_commit_ppo(cell);
  }

  void commit_sac(PendingSac& p) {
    sac_->observe(p.t);
    for (int k = 0; k < cfg_.train.augmentation_copies; ++k) {
      const SlotPermutation perm = SlotPermutation::random(cfg_.sim.max_candidates, aug_rng_);
      ExperienceTuple aug;
      const int trailing = one_loop_ ? 0 : 1;
      aug.state = permute_state(p.t.state, perm, cfg_.sim.max_candidates, trailing);
      aug.next_state = permute_state(p.t.next_state, perm, cfg_.sim.max_candidates, trailing);
      aug.branch = p.t.branch;
      aug.action = perm.remap_action(p.t.action);
      aug.reward = p.t.reward;
      aug.mask = permute_mask(p.t.mask, perm);
      aug.next_mask = permute_mask(p.t.next_mask, perm);
      const size_t branch_len = p.t.mask.size();
      aug.full_mask.reserve(p.t.full_mask.size());
      for (size_t off = 0; off + branch_len <= p.t.full_mask.size(); off += branch_len) {
        ActionMask part(p.t.full_mask.begin() + off, p.t.full_mask.begin() + off + branch_len);
        part = permute_mask(part, perm);
        aug.full_mask.insert(aug.full_mask.end(), part.begin(), part.end());
      }
      sac_->observe(std::move(aug));
    }
  }

  void prepare_ppo_augmentation(PendingPpo& p, int trailing) {
    for (int k = 0; k < cfg_.train.augmentation_copies; ++k) {
      const SlotPermutation perm = SlotPermutation::random(cfg_.sim.max_candidates, aug_rng_);
      VecXf xs = permute_state(p.t.state, perm, cfg_.sim.max_candidates, trailing);
      std::vector<ActionMask> ms;
      ms.reserve(p.t.masks.size());
      for (const auto& m : p.t.masks) ms.push_back(permute_mask(m, perm));
      std::vector<int> as;
      as.reserve(p.t.actions.size());
      for (int a : p.t.actions) as.push_back(perm.remap_action(a));
      p.aug_logp.push_back(ppo_->log_prob_of(xs, ms, as));
      p.aug_value.push_back(ppo_->value_of(xs));
      p.aug_perms.push_back(perm);
    }
  }

  void try_commit_ppo(int cell) {
    auto& pend = ppo_pending_[cell];
    size_t done = 0;
    for (; done < pend.size(); ++done) {
      PendingPpo& p = pend[done];
      if (!p.has_next || !p.has_reward) break;
      ppo_->store(p.t);
      const int parent = static_cast<int>(ppo_->buffer_size()) - 1;
      const int trailing = one_loop_ ? 0 : 1;
      for (size_t k = 0; k < p.aug_perms.size(); ++k) {
        const SlotPermutation& perm = p.aug_perms[k];
        PpoTransition aug;
        aug.state = permute_state(p.t.state, perm, cfg_.sim.max_candidates, trailing);
        aug.next_state = permute_state(p.t.next_state, perm, cfg_.sim.max_candidates, trailing);
        aug.masks.reserve(p.t.masks.size());
        for (const auto& m : p.t.masks) aug.masks.push_back(permute_mask(m, perm));
        aug.actions.reserve(p.t.actions.size());
        for (int a : p.t.actions) aug.actions.push_back(perm.remap_action(a));
        aug.reward = p.t.reward;
        aug.logp_old = p.aug_logp[k];
        aug.value = p.aug_value[k];
        aug.cell = p.t.cell;
        aug.parent = parent;
        ppo_->store(std::move(aug));
      }
    }
    pend.erase(pend.begin(), pend.begin() + done);
  }

  void finalize_ppo_rewards(int cell, double cell_geomean) {
    if (!ppo_) return;
    for (auto& p : ppo_pending_[cell]) {
      if (p.has_reward) continue;
      double reward = 0.0;
      for (int v : p.v_per_rbg)
        reward += reward_ppo(cell_geomean, g_max_, v, p.layer, cfg_.train.reward_scaling_k);
      p.t.reward = reward;
      p.has_reward = true;
    }
    try_commit_ppo(cell);
  }

  void store_expert_labels(const LayerContext& ctx, const StateBundle1L& bundle) {
    ExpertEntry e;
    e.state = bundle.x;
    e.masks = bundle.masks;
    e.labels.resize(bundle.masks.size());
    for (size_t m = 0; m < bundle.masks.size(); ++m)
      e.labels[m] = expert_action_rbg(ctx, static_cast<int>(m), bundle.masks[m]);
    store_expert_with_copies(std::move(e), 0);
  }

  void store_expert_labels_2l(const LayerContext& ctx, int rbg, const StateBundle2L& bundle) {
    ExpertEntry e;
    e.state = bundle.x;
    e.masks = {bundle.mask};
    e.labels = {expert_action_rbg(ctx, rbg, bundle.mask)};
    store_expert_with_copies(std::move(e), 1);
  }

  void store_expert_with_copies(ExpertEntry e, int trailing) {
    for (int k = 0; k < cfg_.train.augmentation_copies; ++k) {
      const SlotPermutation perm = SlotPermutation::random(cfg_.sim.max_candidates, aug_rng_);
      ExpertEntry aug;
      aug.state = permute_state(e.state, perm, cfg_.sim.max_candidates, trailing);
      aug.masks.reserve(e.masks.size());
      for (const auto& m : e.masks) aug.masks.push_back(permute_mask(m, perm));
      aug.labels.reserve(e.labels.size());
      for (int a : e.labels) aug.labels.push_back(perm.remap_action(a));
      ppo_->store_expert(std::move(aug));
    }
    ppo_->store_expert(std::move(e));
  }

  void run_updates(bool emitted) {
    if (!emitted) return;
    if (sac_) {
      const double span = std::max(1.0, static_cast<double>(cfg_.train.train_ttis));
      const double progress =
          std::clamp((static_cast<double>(state_.tti) - cfg_.sim.warmup_ttis) / span, 0.0, 1.0);
      const double omega_prime =
          cfg_.train.omega_prime_start +
          (cfg_.train.omega_prime_end - cfg_.train.omega_prime_start) * progress;
      // One epoch per sample: as many batch updates as tuples arrive per TTI.
      const int per_tti = cfg_.sim.max_layers * cfg_.sim.n_rbg * cfg_.sim.n_cells *
                          (1 + cfg_.train.augmentation_copies);
      int updates = cfg_.train.sac_updates_per_tti;
      if (updates <= 0)
        updates = std::max(1, (per_tti + cfg_.train.sac_batch_size / 2) /
                                  cfg_.train.sac_batch_size);
      for (int k = 0; k < updates; ++k) {
        sac_stats_ = sac_->update(omega_prime, agent_rng_);
        result_.max_abs_target_minus_reward = std::max(
            result_.max_abs_target_minus_reward, sac_stats_.max_abs_target_minus_reward);
      }
    } else if (ppo_->ready()) {
      ppo_stats_ = ppo_->update(agent_rng_);
      for (int k = 1; k < cfg_.train.jsd_steps_per_update; ++k)
        ppo_stats_.l_jsd = ppo_->jsd_update(agent_rng_);
    }
  }

  RunConfig cfg_;
  TrainOptions opt_;
  bool one_loop_;
  SimState state_;
  Rng agent_rng_;
  Rng aug_rng_;
  std::optional<PpoAgent> ppo_;
  std::optional<SacAgent> sac_;
  std::vector<std::vector<PendingSac>> sac_pending_; // [cell] fifo
  std::vector<std::vector<PendingPpo>> ppo_pending_; // [cell] fifo
  double g_max_ = 1e-12;
  std::vector<double> window_;
  TrainResult result_;
  PpoUpdateStats ppo_stats_;
  SacUpdateStats sac_stats_;
};

}  // namespace

TrainResult train_agent(const RunConfig& cfg, const TrainOptions& opt) {
  Trainer trainer(cfg, opt);
  return trainer.run();
}

}  // namespace deepsched
