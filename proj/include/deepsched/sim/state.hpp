#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

#include "deepsched/common.hpp"
#include "deepsched/sim/config.hpp"

namespace deepsched {

enum class TrafficModel { full_buffer, ftp3 };

/// CSI as reported by one UE: wideband/sub-band CQI, rank and per-RBG precoders.
struct ChannelReport {
  int wideband_cqi = 1;
  Eigen::VectorXi subband_cqi;        // per RBG
  int rank = 1;                       // h_u in {1, 2}
  std::vector<MatXcd> precoder;       // per RBG, n_antennas x rank, orthonormal columns
};

struct UeState {
  int id = 0;
  TrafficModel traffic = TrafficModel::full_buffer;

  double buffer_bytes = 0.0;
  double smoothed_tput = 0.0; // R_u, bits/s
  double inst_tput = 0.0;     // p_u, bits/s

  ChannelReport report;

  // Throughput / UPT accounting.
  double cum_served_bits = 0.0;
  double cum_arrived_bytes = 0.0;
  long long busy_ttis = 0;
  bool busy_this_tti = false;

  // Channel internals (not part of any report).
  double signal_power_dbm = 0.0;      // tx power minus pathloss and shadowing
  Eigen::VectorXcd fading;            // per-RBG AR(1) complex coefficient
  std::vector<MatXcd> precoder_seed;  // per-RBG n_antennas x max_rank Gaussian AR(1) state
  double rank_state = 0.0;            // AR(1) scalar driving the rank report
  Eigen::VectorXd sinr_lin;           // per-RBG linear SINR, refreshed each TTI
};

struct SimState {
  SimConfig cfg;
  long long tti = 0;
  std::vector<std::vector<UeState>> cells; // [cell][ue]
  double r_max = 1.0;                      // running max of R_u, floored at 1 bit/s
  Rng rng_channel;
  Rng rng_traffic;

  const UeState& ue(int cell, int u) const { return cells[cell][u]; }
  UeState& ue(int cell, int u) { return cells[cell][u]; }
};

}  // namespace deepsched
