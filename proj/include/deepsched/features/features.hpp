#pragma once

#include <span>
#include <vector>

#include "deepsched/common.hpp"
#include "deepsched/sim/env.hpp"
#include "deepsched/sim/grid.hpp"
#include "deepsched/sim/state.hpp"

namespace deepsched {

/// Everything a state builder needs about one decision stage: which cell and
/// user layer is being scheduled, the grid filled through the lower layers,
/// and the TD-scheduler candidate shortlist (PF order).
struct LayerContext {
  const SimState* state = nullptr;
  const AllocationGrid* grid = nullptr;
  int cell = 0;
  int layer = 0; // 0-based user layer being decided
  std::vector<int> candidates;
};

/// Wideband part of one UE feature segment, all in [0,1].
struct UeFeatureSegment {
  float r_hat = 0.f;
  float h_hat = 0.f;
  float d_hat = 0.f;
  float b_hat = 0.f;
  float o_hat = 0.f;
};

UeFeatureSegment build_segment(const SimState& state, int cell, int ue, int d_u);

inline int state_size_1l(int u_max, int n_rbg) { return u_max * (5 + 2 * n_rbg); }
inline int state_size_2l(int u_max) { return u_max * 8 + 1; }
inline int actions_per_branch(int u_max) { return u_max + 1; } // last = no-allocation

/// Validity mask for one RBG branch: a slot is valid when it holds a candidate
/// not already on this RBG; layers beyond the first additionally require the
/// previous layer to be occupied. No-allocation is always valid.
ActionMask build_mask(const LayerContext& ctx, int rbg);

struct StateBundle1L {
  VecXf x;
  std::vector<ActionMask> masks; // one per RBG branch
};

struct StateBundle2L {
  VecXf x;
  ActionMask mask;
};

/// Flat 1L state: |U| segments of [5 wideband, g_hat per RBG, rho per RBG];
/// absent candidates are zero-blanked and masked out on every branch.
/// Throws when more than |U| candidates are passed.
StateBundle1L build_state_1l(const LayerContext& ctx);

/// Flat 2L state for one RBG: |U| segments of 8 features plus the trailing
/// incumbent-count scalar (count / |L|).
StateBundle2L build_state_2l(const LayerContext& ctx, int rbg);

/// Slot permutation for training-data augmentation. perm[i] is the slot that
/// segment i moves to; the no-allocation action index is fixed.
struct SlotPermutation {
  std::vector<int> perm;

  explicit SlotPermutation(std::vector<int> p);
  static SlotPermutation identity(int n);
  static SlotPermutation random(int n, Rng& rng);

  int remap_action(int action) const {
    return action < static_cast<int>(perm.size()) ? perm[action] : action;
  }
  SlotPermutation inverse() const;
};

/// Applies the permutation to a state vector laid out as |U| equal segments
/// (optionally with trailing non-segment scalars) and to its masks.
VecXf permute_state(const VecXf& x, const SlotPermutation& p, int u_max, int trailing = 0);
ActionMask permute_mask(const ActionMask& mask, const SlotPermutation& p);

StateBundle1L permute_segments(const StateBundle1L& b, const SlotPermutation& p, int u_max);
StateBundle2L permute_segments(const StateBundle2L& b, const SlotPermutation& p, int u_max);

}  // namespace deepsched
