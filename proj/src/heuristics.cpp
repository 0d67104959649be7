#include "deepsched/sched/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deepsched {

double pf_metric(const SimState& state, int cell, int ue, int rbg,
                 std::span<const int> scheduled) {
  const UeState& u = state.ue(cell, ue);
  const double rate = estimate_rate(state, cell, ue, rbg, scheduled);
  const double deliverable = u.buffer_bytes * 8.0 / state.cfg.tti_duration_s;
  return std::min(rate, deliverable) / std::max(u.smoothed_tput, 1.0);
}

std::vector<int> td_select(const SimState& state, int cell, int max_candidates) {
  struct Entry {
    int ue;
    double metric;
  };
  std::vector<Entry> entries;
  const std::vector<int> none;
  for (int u = 0; u < state.cfg.n_ues_per_cell; ++u) {
    if (state.ue(cell, u).buffer_bytes <= 0.0) continue;
    double wideband = 0.0;
    for (int m = 0; m < state.cfg.n_rbg; ++m)
      wideband += estimate_rate(state, cell, u, m, none);
    entries.push_back({u, wideband / std::max(state.ue(cell, u).smoothed_tput, 1.0)});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.metric != b.metric) return a.metric > b.metric;
    return a.ue < b.ue;
  });
  if (static_cast<int>(entries.size()) > max_candidates) entries.resize(max_candidates);

  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.ue);
  return out;
}

void fds_layer1(const SimState& state, std::span<const int> candidates,
                AllocationGrid& grid, int cell) {
  const std::vector<int> none;
  for (int m = 0; m < state.cfg.n_rbg; ++m) {
    int best = -1;
    double best_metric = 0.0;
    for (int u : candidates) {
      const double metric = pf_metric(state, cell, u, m, none);
      if (metric > best_metric) {
        best_metric = metric;
        best = u;
      }
    }
    if (best >= 0) grid.assign(cell, m, 0, best);
  }
}

namespace {

/// Fills layers 2..|L| of one RBG given a per-layer chooser; stops the RBG as
/// soon as a layer stays empty.
template <class Chooser>
void fill_upper_layers(const SimState& state, AllocationGrid& grid, int cell, int rbg,
                       Chooser choose) {
  for (int l = 1; l < state.cfg.max_layers; ++l) {
    if (grid.at(cell, rbg, l - 1) == AllocationGrid::kNone) break;
    const int pick = choose(rbg, l);
    if (pick < 0) break;
    grid.assign(cell, rbg, l, pick);
  }
}

}  // namespace

void baseline_sds(const SimState& state, std::span<const int> candidates,
                  AllocationGrid& grid, int cell) {
  for (int m = 0; m < state.cfg.n_rbg; ++m) {
    fill_upper_layers(state, grid, cell, m, [&](int rbg, int layer) {
      const std::vector<int> incumbents = grid.scheduled_below(cell, rbg, layer);
      const double before = rbg_sum_rate(state, cell, rbg, incumbents);
      for (int u : candidates) {
        if (grid.ue_on_rbg(cell, rbg, u)) continue;
        std::vector<int> with = incumbents;
        with.push_back(u);
        if (sum_throughput_increases(before, rbg_sum_rate(state, cell, rbg, with))) return u;
      }
      return -1;
    });
  }
}

void pf_greedy_sds(const SimState& state, std::span<const int> candidates,
                   AllocationGrid& grid, int cell) {
  for (int m = 0; m < state.cfg.n_rbg; ++m) {
    fill_upper_layers(state, grid, cell, m, [&](int rbg, int layer) {
      const std::vector<int> incumbents = grid.scheduled_below(cell, rbg, layer);
      const double before = rbg_sum_rate(state, cell, rbg, incumbents);
      int best = -1;
      double best_pf_sum = -std::numeric_limits<double>::infinity();
      for (int u : candidates) {
        if (grid.ue_on_rbg(cell, rbg, u)) continue;
        std::vector<int> with = incumbents;
        with.push_back(u);
        if (!sum_throughput_increases(before, rbg_sum_rate(state, cell, rbg, with))) continue;
        double pf_sum = 0.0;
        for (int c : with)
          pf_sum += estimate_rate(state, cell, c, rbg, with) /
                    std::max(state.ue(cell, c).smoothed_tput, 1.0);
        if (pf_sum > best_pf_sum) {
          best_pf_sum = pf_sum;
          best = u;
        }
      }
      return best;
    });
  }
}

int expert_action_rbg(const LayerContext& ctx, int rbg, const ActionMask& mask) {
  const int u_max = ctx.state->cfg.max_candidates;
  const auto sched = ctx.grid->scheduled_below(ctx.cell, rbg, ctx.layer);
  int best = u_max; // no-allocation
  double best_metric = 0.0;
  for (size_t i = 0; i < ctx.candidates.size(); ++i) {
    if (!mask[i]) continue;
    const double metric = pf_metric(*ctx.state, ctx.cell, ctx.candidates[i], rbg, sched);
    if (metric > best_metric) {
      best_metric = metric;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<int> expert_action(const LayerContext& ctx) {
  std::vector<int> actions(ctx.state->cfg.n_rbg);
  for (int m = 0; m < ctx.state->cfg.n_rbg; ++m)
    actions[m] = expert_action_rbg(ctx, m, build_mask(ctx, m));
  return actions;
}

int better_choice_exists(const LayerContext& ctx, int rbg, int chosen_action,
                         const ActionMask& mask) {
  const int u_max = ctx.state->cfg.max_candidates;
  const auto sched = ctx.grid->scheduled_below(ctx.cell, rbg, ctx.layer);

  auto metric_of = [&](int action) {
    if (action >= u_max || action >= static_cast<int>(ctx.candidates.size())) return 0.0;
    return pf_metric(*ctx.state, ctx.cell, ctx.candidates[action], rbg, sched);
  };

  const double chosen = metric_of(chosen_action);
  for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
    if (!mask[a] || a == chosen_action) continue;
    if (metric_of(a) > chosen) return -1;
  }
  return 1;
}

}  // namespace deepsched
