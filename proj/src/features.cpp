#include "deepsched/features/features.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace deepsched {

namespace {

constexpr double kSubbandCqiNorm = 15.0; // g_bar

void check_ctx(const LayerContext& ctx) {
  if (!ctx.state || !ctx.grid) throw std::invalid_argument("LayerContext: missing state or grid");
  if (static_cast<int>(ctx.candidates.size()) > ctx.state->cfg.max_candidates)
    throw std::invalid_argument("LayerContext: more candidates than max_candidates");
}

}  // namespace

ActionMask build_mask(const LayerContext& ctx, int rbg) {
  const int u_max = ctx.state->cfg.max_candidates;
  ActionMask mask(actions_per_branch(u_max), 0);
  mask[u_max] = 1;

  const bool layer_open =
      ctx.layer == 0 || ctx.grid->at(ctx.cell, rbg, ctx.layer - 1) != AllocationGrid::kNone;
  if (!layer_open) return mask;

  for (size_t i = 0; i < ctx.candidates.size(); ++i)
    if (!ctx.grid->ue_on_rbg(ctx.cell, rbg, ctx.candidates[i])) mask[i] = 1;
  return mask;
}

UeFeatureSegment build_segment(const SimState& state, int cell, int ue, int d_u) {
  const SimConfig& cfg = state.cfg;
  const UeState& u = state.ue(cell, ue);
  UeFeatureSegment seg;
  seg.r_hat = static_cast<float>(u.smoothed_tput / std::max(state.r_max, 1.0));
  seg.h_hat = static_cast<float>(u.report.rank / 2.0);
  seg.d_hat = static_cast<float>(static_cast<double>(d_u) / cfg.n_rbg);
  seg.b_hat = static_cast<float>(std::min(u.buffer_bytes / cfg.b_max_bytes, 1.0));
  seg.o_hat = static_cast<float>(static_cast<double>(u.report.wideband_cqi - cfg.cqi_min) /
                                 (cfg.cqi_max - cfg.cqi_min));
  return seg;
}

StateBundle1L build_state_1l(const LayerContext& ctx) {
  check_ctx(ctx);
  const SimState& state = *ctx.state;
  const SimConfig& cfg = state.cfg;
  const int u_max = cfg.max_candidates;
  const int seg_len = 5 + 2 * cfg.n_rbg;

  StateBundle1L out;
  out.x = VecXf::Zero(state_size_1l(u_max, cfg.n_rbg));

  for (size_t i = 0; i < ctx.candidates.size(); ++i) {
    const int ue = ctx.candidates[i];
    const int d_u = ctx.grid->rbg_count_below(ctx.cell, ue, ctx.layer);
    const UeFeatureSegment seg = build_segment(state, ctx.cell, ue, d_u);
    float* base = out.x.data() + i * seg_len;
    base[0] = seg.r_hat;
    base[1] = seg.h_hat;
    base[2] = seg.d_hat;
    base[3] = seg.b_hat;
    base[4] = seg.o_hat;
    for (int m = 0; m < cfg.n_rbg; ++m) {
      base[5 + m] =
          static_cast<float>(state.ue(ctx.cell, ue).report.subband_cqi(m) / kSubbandCqiNorm);
      const auto sched = ctx.grid->scheduled_below(ctx.cell, m, ctx.layer);
      base[5 + cfg.n_rbg + m] =
          static_cast<float>(max_crosscorr(state, ctx.cell, m, ue, sched));
    }
  }

  out.masks.resize(cfg.n_rbg);
  for (int m = 0; m < cfg.n_rbg; ++m) out.masks[m] = build_mask(ctx, m);
  return out;
}

StateBundle2L build_state_2l(const LayerContext& ctx, int rbg) {
  check_ctx(ctx);
  const SimState& state = *ctx.state;
  const SimConfig& cfg = state.cfg;
  const int u_max = cfg.max_candidates;

  StateBundle2L out;
  out.x = VecXf::Zero(state_size_2l(u_max));

  const auto sched = ctx.grid->scheduled_below(ctx.cell, rbg, ctx.layer);
  for (size_t i = 0; i < ctx.candidates.size(); ++i) {
    const int ue = ctx.candidates[i];
    const int d_u = ctx.grid->rbg_count_below(ctx.cell, ue, ctx.layer);
    const UeFeatureSegment seg = build_segment(state, ctx.cell, ue, d_u);
    float* base = out.x.data() + i * 8;
    base[0] = seg.r_hat;
    base[1] = seg.h_hat;
    base[2] = seg.d_hat;
    base[3] = seg.b_hat;
    base[4] = seg.o_hat;
    base[5] = static_cast<float>(state.ue(ctx.cell, ue).report.subband_cqi(rbg) / kSubbandCqiNorm);
    base[6] = static_cast<float>(max_crosscorr(state, ctx.cell, rbg, ue, sched));
    base[7] = static_cast<float>(mean_crosscorr(state, ctx.cell, rbg, ue, sched));
  }
  out.x(u_max * 8) = static_cast<float>(static_cast<double>(sched.size()) / cfg.max_layers);

  out.mask = build_mask(ctx, rbg);
  return out;
}

SlotPermutation::SlotPermutation(std::vector<int> p) : perm(std::move(p)) {
  std::vector<char> seen(perm.size(), 0);
  for (int v : perm) {
    if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v])
      throw std::invalid_argument("SlotPermutation: not a bijection");
    seen[v] = 1;
  }
}

SlotPermutation SlotPermutation::identity(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return SlotPermutation(std::move(p));
}

SlotPermutation SlotPermutation::random(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> d(0, i);
    std::swap(p[i], p[d(rng)]);
  }
  return SlotPermutation(std::move(p));
}

SlotPermutation SlotPermutation::inverse() const {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return SlotPermutation(std::move(inv));
}

VecXf permute_state(const VecXf& x, const SlotPermutation& p, int u_max, int trailing) {
  const int n = static_cast<int>(p.perm.size());
  if (n != u_max) throw std::invalid_argument("permute_state: permutation size != |U|");
  const int seg_len = (static_cast<int>(x.size()) - trailing) / u_max;
  VecXf out = x;
  for (int i = 0; i < u_max; ++i)
    out.segment(static_cast<Eigen::Index>(p.perm[i]) * seg_len, seg_len) =
        x.segment(static_cast<Eigen::Index>(i) * seg_len, seg_len);
  return out;
}

ActionMask permute_mask(const ActionMask& mask, const SlotPermutation& p) {
  ActionMask out = mask;
  for (size_t i = 0; i < p.perm.size(); ++i) out[p.perm[i]] = mask[i];
  return out;
}

StateBundle1L permute_segments(const StateBundle1L& b, const SlotPermutation& p, int u_max) {
  StateBundle1L out;
  out.x = permute_state(b.x, p, u_max, 0);
  out.masks.reserve(b.masks.size());
  for (const auto& m : b.masks) out.masks.push_back(permute_mask(m, p));
  return out;
}

StateBundle2L permute_segments(const StateBundle2L& b, const SlotPermutation& p, int u_max) {
  StateBundle2L out;
  out.x = permute_state(b.x, p, u_max, 1);
  out.mask = permute_mask(b.mask, p);
  return out;
}

}  // namespace deepsched
