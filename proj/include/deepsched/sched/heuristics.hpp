#pragma once

#include <span>
#include <vector>

#include "deepsched/features/features.hpp"
#include "deepsched/sim/env.hpp"

namespace deepsched {

/// T_{u,m,l} / R_u with the rate clamped by what the buffer can deliver in one
/// TTI and R_u floored at 1 bit/s.
double pf_metric(const SimState& state, int cell, int ue, int rbg,
                 std::span<const int> scheduled);

/// TD scheduler: top `max_candidates` UEs by wideband PF metric
/// (sum over RBGs of the single-user rate over R_u), descending; UEs with
/// empty buffers are excluded. Ties break toward the lower UE index.
std::vector<int> td_select(const SimState& state, int cell, int max_candidates);

/// Layer-1 frequency-domain step shared by the heuristics: per RBG, assign the
/// candidate with the highest positive PF metric.
void fds_layer1(const SimState& state, std::span<const int> candidates,
                AllocationGrid& grid, int cell);

/// Baseline spatial-domain scheduler: per RBG, fill layers 2..|L| with the
/// first candidate (in the given PF order) whose addition strictly increases
/// the RBG's sum throughput; stop the RBG when none qualifies.
void baseline_sds(const SimState& state, std::span<const int> candidates,
                  AllocationGrid& grid, int cell);

/// PF-greedy spatial-domain scheduler: per RBG and layer, pick the candidate
/// maximizing the RBG's PF sum metric among those that increase sum throughput.
void pf_greedy_sds(const SimState& state, std::span<const int> candidates,
                   AllocationGrid& grid, int cell);

/// Expert policy for one decision stage: per RBG the masked argmax of the PF
/// metric (slot index), or the no-allocation index when no candidate has a
/// positive metric. Ties break toward the lower slot.
std::vector<int> expert_action(const LayerContext& ctx);
int expert_action_rbg(const LayerContext& ctx, int rbg, const ActionMask& mask);

/// Greedy better-choice indicator v_m: -1 iff some valid alternative action
/// (candidate slot or no-allocation) has a strictly higher PF metric than the
/// chosen one, else +1. The no-allocation metric is 0.
int better_choice_exists(const LayerContext& ctx, int rbg, int chosen_action,
                         const ActionMask& mask);

/// Strict-increase test used by both SDS schedulers.
inline bool sum_throughput_increases(double before, double after) {
  return after > before + 1e-9;
}

}  // namespace deepsched
