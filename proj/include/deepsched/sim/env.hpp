#pragma once

#include <span>

#include "deepsched/sim/config.hpp"
#include "deepsched/sim/grid.hpp"
#include "deepsched/sim/state.hpp"

namespace deepsched {

/// Deterministic world construction: UE placement, pathloss/shadowing draws,
/// initial channel reports. Throws on an invalid config.
SimState init_sim(const SimConfig& cfg);

/// One TTI of channel evolution: AR(1) fading, SINR refresh, CQI/rank/precoder reports.
void advance_channel(SimState& state);

/// Buffer arrivals: full-buffer UEs pinned at b_max, FTP3 UEs get Poisson packet
/// arrivals. Also latches the per-TTI busy flag (buffer > 0 after arrivals).
void generate_traffic(SimState& state);

/// Quantizes an SINR in dB onto the configured CQI range. Monotone.
int cqi_from_sinr_db(const SimConfig& cfg, double sinr_db);

/// gNB-side linear SINR reconstructed from a reported CQI (bin center).
/// Every scheduler-facing rate estimate works from reports, never from the
/// underlying fading state.
double sinr_from_cqi(const SimConfig& cfg, int cqi);

/// kappa_{m,u,c} = max_j sum_i |[P_u^H P_c]_{i,j}| over the h_c columns of P_c.
double precoder_crosscorr(const MatXcd& p_u, const MatXcd& p_c);

/// rho_{m,u}: max kappa against the already scheduled set; 0 for the empty set.
double max_crosscorr(const SimState& state, int cell, int rbg, int ue,
                     std::span<const int> scheduled);

/// Mean kappa against the scheduled set (the 2L 8th feature); 0 for the empty set.
double mean_crosscorr(const SimState& state, int cell, int rbg, int ue,
                      std::span<const int> scheduled);

/// Achievable rate T_{u,m,l} in bits/s for `ue` on `rbg` given the co-scheduled
/// set: SINR_eff = S / (1 + S * sum kappa^2) with S taken from the reported
/// sub-band CQI, rate = B log2(1 + SINR_eff) times the rank factor
/// min(h_u, spatial headroom).
double estimate_rate(const SimState& state, int cell, int ue, int rbg,
                     std::span<const int> scheduled);

/// Sum of all members' rates on (cell, rbg) with mutual interference applied.
double rbg_sum_rate(const SimState& state, int cell, int rbg, std::span<const int> members);

/// Executes a grid: serves buffers, sets p_u, applies the smoothing recurrence
/// R_u = (1-eps) p_u + eps R_u'', updates UPT accounting and r_max.
/// Rejects grids violating the AllocationGrid invariants.
TtiOutcome apply_allocation(SimState& state, const AllocationGrid& grid);

/// R = (1-eps) p + eps R_prev. Throws when eps is outside (0,1).
double smooth_throughput(double r_prev, double p, double eps);

}  // namespace deepsched
