#pragma once

#include <cstdint>

namespace deepsched {

/// World and radio-model parameters for one simulation run.
/// Defaults are the desk-scale profile; paper-scale values are a config away.
struct SimConfig {
  int n_cells = 3;
  int n_ues_per_cell = 12;
  int n_rbg = 6;          // N_RBG
  int max_candidates = 4; // |U|, TD-scheduler shortlist size
  int max_layers = 2;     // |L|, MU-MIMO user layers per RBG
  int max_rank = 2;       // per-UE spatial streams, <= 2

  double rbg_bandwidth_hz = 2.0e6;
  double tti_duration_s = 5.0e-4;

  // Traffic: a UE is either full-buffer or FTP3 (Poisson packet arrivals).
  double full_buffer_fraction = 0.5;
  double ftp3_packet_bytes = 30000.0;
  double ftp3_rate_pps = 20.0;

  double smoothing_forget = 0.99; // epsilon of the throughput recurrence
  double b_max_bytes = 10.0e6;    // buffer-status normalizer, full-buffer fill level

  std::uint64_t seed = 1;
  int warmup_ttis = 100;

  // Declared channel abstraction.
  int n_antennas = 8;
  double fading_persistence = 0.9; // AR(1) coefficient per TTI
  double tx_power_dbm = 44.0;
  double noise_power_dbm = -80.0;
  double intercell_interference_dbm = -65.0;
  double pathloss_ref_db = 80.0;
  double pathloss_exponent = 3.5;
  double ref_distance_m = 10.0;
  double cell_radius_m = 150.0;
  double shadowing_std_db = 9.0;

  // SINR -> CQI quantizer bounds (15 uniform levels).
  double cqi_sinr_lo_db = -6.0;
  double cqi_sinr_hi_db = 22.0;
  int cqi_min = 1;
  int cqi_max = 15;

  /// Throws std::invalid_argument on out-of-domain values.
  void validate() const;
};

}  // namespace deepsched
