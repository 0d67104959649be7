#include "deepsched/sim/env.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace deepsched {

namespace {

double dbm_to_linear_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

std::complex<double> draw_cn(Rng& rng) {
  // CN(0,1): independent N(0, 1/2) parts.
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}

/// Orthonormalizes the first `rank` columns of `seed` (modified Gram-Schmidt).
MatXcd orthonormal_columns(const MatXcd& seed, int rank) {
  MatXcd p = seed.leftCols(rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < j; ++i) {
      std::complex<double> proj = p.col(i).dot(p.col(j));
      p.col(j) -= proj * p.col(i);
    }
    double norm = p.col(j).norm();
    if (norm < 1e-12) {
      // Degenerate draw; fall back to a canonical basis column.
      p.col(j).setZero();
      p(j % p.rows(), j) = 1.0;
      norm = 1.0;
    } else {
      p.col(j) /= norm;
    }
  }
  return p;
}

void refresh_report(const SimConfig& cfg, UeState& ue) {
  const double sig_mw = dbm_to_linear_mw(ue.signal_power_dbm);
  const double denom_mw =
      dbm_to_linear_mw(cfg.noise_power_dbm) + dbm_to_linear_mw(cfg.intercell_interference_dbm);

  ue.sinr_lin.resize(cfg.n_rbg);
  ue.report.subband_cqi.resize(cfg.n_rbg);
  for (int m = 0; m < cfg.n_rbg; ++m) {
    const double gain = std::norm(ue.fading(m)); // |h|^2, exponential with mean 1
    ue.sinr_lin(m) = sig_mw * gain / denom_mw;
    const double sinr_db = 10.0 * std::log10(std::max(ue.sinr_lin(m), 1e-30));
    ue.report.subband_cqi(m) = cqi_from_sinr_db(cfg, sinr_db);
  }
  const double wideband = ue.sinr_lin.mean();
  ue.report.wideband_cqi = cqi_from_sinr_db(cfg, 10.0 * std::log10(std::max(wideband, 1e-30)));

  ue.report.rank = (cfg.max_rank >= 2 && ue.rank_state > 0.0) ? 2 : 1;
  ue.report.precoder.resize(cfg.n_rbg);
  for (int m = 0; m < cfg.n_rbg; ++m)
    ue.report.precoder[m] = orthonormal_columns(ue.precoder_seed[m], ue.report.rank);
}

}  // namespace

void SimConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SimConfig: ") + what);
  };
  need(n_cells >= 1, "n_cells must be >= 1");
  need(n_ues_per_cell >= 1, "n_ues_per_cell must be >= 1");
  need(n_rbg >= 1, "n_rbg must be >= 1");
  need(max_candidates >= 1, "max_candidates must be >= 1");
  need(max_layers >= 1, "max_layers must be >= 1");
  need(max_rank >= 1 && max_rank <= 2, "max_rank must be 1 or 2");
  need(smoothing_forget > 0.0 && smoothing_forget < 1.0, "smoothing_forget must be in (0,1)");
  need(warmup_ttis >= 0, "warmup_ttis must be >= 0");
  need(rbg_bandwidth_hz > 0.0, "rbg_bandwidth_hz must be > 0");
  need(tti_duration_s > 0.0, "tti_duration_s must be > 0");
  need(full_buffer_fraction >= 0.0 && full_buffer_fraction <= 1.0,
       "full_buffer_fraction must be in [0,1]");
  need(ftp3_packet_bytes > 0.0, "ftp3_packet_bytes must be > 0");
  need(ftp3_rate_pps >= 0.0, "ftp3_rate_pps must be >= 0");
  need(b_max_bytes > 0.0, "b_max_bytes must be > 0");
  need(n_antennas >= max_rank, "n_antennas must be >= max_rank");
  need(fading_persistence >= 0.0 && fading_persistence <= 1.0,
       "fading_persistence must be in [0,1]");
  need(cqi_sinr_hi_db > cqi_sinr_lo_db, "CQI quantizer range must be non-empty");
  need(cqi_max > cqi_min, "CQI bounds must satisfy cqi_max > cqi_min");
}

int cqi_from_sinr_db(const SimConfig& cfg, double sinr_db) {
  const int levels = cfg.cqi_max - cfg.cqi_min + 1;
  const double step = (cfg.cqi_sinr_hi_db - cfg.cqi_sinr_lo_db) / levels;
  const int bin = static_cast<int>(std::floor((sinr_db - cfg.cqi_sinr_lo_db) / step));
  return std::clamp(cfg.cqi_min + bin, cfg.cqi_min, cfg.cqi_max);
}

double sinr_from_cqi(const SimConfig& cfg, int cqi) {
  const int levels = cfg.cqi_max - cfg.cqi_min + 1;
  const double step = (cfg.cqi_sinr_hi_db - cfg.cqi_sinr_lo_db) / levels;
  const double center_db =
      cfg.cqi_sinr_lo_db + (static_cast<double>(cqi - cfg.cqi_min) + 0.5) * step;
  return std::pow(10.0, center_db / 10.0);
}

SimState init_sim(const SimConfig& cfg) {
  cfg.validate();

  SimState state;
  state.cfg = cfg;
  state.rng_channel.seed(cfg.seed * 0x9e3779b97f4a7c15ULL + 0x1234abcdULL);
  state.rng_traffic.seed(cfg.seed * 0xbf58476d1ce4e5b9ULL + 0x5678ef01ULL);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> shadow(0.0, cfg.shadowing_std_db);

  const int fb_count = static_cast<int>(std::lround(cfg.full_buffer_fraction * cfg.n_ues_per_cell));

  state.cells.resize(cfg.n_cells);
  for (int c = 0; c < cfg.n_cells; ++c) {
    auto& cell = state.cells[c];
    cell.resize(cfg.n_ues_per_cell);
    for (int u = 0; u < cfg.n_ues_per_cell; ++u) {
      UeState& ue = cell[u];
      ue.id = u;
      ue.traffic = (u < fb_count) ? TrafficModel::full_buffer : TrafficModel::ftp3;
      ue.buffer_bytes = (ue.traffic == TrafficModel::full_buffer) ? cfg.b_max_bytes : 0.0;
      ue.smoothed_tput = 0.0;
      ue.inst_tput = 0.0;

      // Uniform placement over the annulus [ref_distance, cell_radius].
      const double r2lo = cfg.ref_distance_m * cfg.ref_distance_m;
      const double r2hi = cfg.cell_radius_m * cfg.cell_radius_m;
      const double dist = std::sqrt(r2lo + unif(state.rng_channel) * (r2hi - r2lo));
      const double pathloss_db =
          cfg.pathloss_ref_db +
          10.0 * cfg.pathloss_exponent * std::log10(dist / cfg.ref_distance_m);
      ue.signal_power_dbm = cfg.tx_power_dbm - pathloss_db - shadow(state.rng_channel);

      ue.fading.resize(cfg.n_rbg);
      for (int m = 0; m < cfg.n_rbg; ++m) ue.fading(m) = draw_cn(state.rng_channel);
      ue.precoder_seed.assign(cfg.n_rbg, MatXcd(cfg.n_antennas, cfg.max_rank));
      for (int m = 0; m < cfg.n_rbg; ++m)
        for (int i = 0; i < cfg.n_antennas; ++i)
          for (int j = 0; j < cfg.max_rank; ++j) ue.precoder_seed[m](i, j) = draw_cn(state.rng_channel);
      {
        std::normal_distribution<double> n01(0.0, 1.0);
        ue.rank_state = n01(state.rng_channel);
      }
      refresh_report(cfg, ue);
    }
  }
  return state;
}

void advance_channel(SimState& state) {
  const SimConfig& cfg = state.cfg;
  const double rho = cfg.fading_persistence;
  const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::normal_distribution<double> n01(0.0, 1.0);

  for (auto& cell : state.cells) {
    for (auto& ue : cell) {
      for (int m = 0; m < cfg.n_rbg; ++m)
        ue.fading(m) = rho * ue.fading(m) + innov * draw_cn(state.rng_channel);
      for (int m = 0; m < cfg.n_rbg; ++m)
        for (int i = 0; i < cfg.n_antennas; ++i)
          for (int j = 0; j < cfg.max_rank; ++j)
            ue.precoder_seed[m](i, j) =
                rho * ue.precoder_seed[m](i, j) + innov * draw_cn(state.rng_channel);
      ue.rank_state = rho * ue.rank_state + innov * n01(state.rng_channel);
      refresh_report(cfg, ue);
    }
  }
}

void generate_traffic(SimState& state) {
  const SimConfig& cfg = state.cfg;
  const double mean_arrivals = cfg.ftp3_rate_pps * cfg.tti_duration_s;
  std::poisson_distribution<int> poisson(mean_arrivals);

  for (auto& cell : state.cells) {
    for (auto& ue : cell) {
      if (ue.traffic == TrafficModel::full_buffer) {
        ue.buffer_bytes = cfg.b_max_bytes;
      } else if (mean_arrivals > 0.0) {
        const int packets = poisson(state.rng_traffic);
        const double bytes = packets * cfg.ftp3_packet_bytes;
        ue.buffer_bytes += bytes;
        ue.cum_arrived_bytes += bytes;
      }
      ue.busy_this_tti = ue.buffer_bytes > 0.0;
    }
  }
}

double precoder_crosscorr(const MatXcd& p_u, const MatXcd& p_c) {
  if (p_u.rows() != p_c.rows())
    throw std::invalid_argument("precoder_crosscorr: antenna dimensions differ");
  const MatXcd prod = p_u.adjoint() * p_c; // h_u x h_c
  double best = 0.0;
  for (int j = 0; j < prod.cols(); ++j) best = std::max(best, prod.col(j).cwiseAbs().sum());
  return best;
}

double max_crosscorr(const SimState& state, int cell, int rbg, int ue,
                     std::span<const int> scheduled) {
  double best = 0.0;
  const auto& pu = state.ue(cell, ue).report.precoder[rbg];
  for (int c : scheduled) {
    if (c == ue) continue;
    best = std::max(best, precoder_crosscorr(pu, state.ue(cell, c).report.precoder[rbg]));
  }
  return best;
}

double mean_crosscorr(const SimState& state, int cell, int rbg, int ue,
                      std::span<const int> scheduled) {
  double sum = 0.0;
  int n = 0;
  const auto& pu = state.ue(cell, ue).report.precoder[rbg];
  for (int c : scheduled) {
    if (c == ue) continue;
    sum += precoder_crosscorr(pu, state.ue(cell, c).report.precoder[rbg]);
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

double estimate_rate(const SimState& state, int cell, int ue, int rbg,
                     std::span<const int> scheduled) {
  const SimConfig& cfg = state.cfg;
  const UeState& u = state.ue(cell, ue);
  const double s = sinr_from_cqi(cfg, u.report.subband_cqi(rbg));

  double interference = 0.0;
  int rank_in_use = 0;
  for (int c : scheduled) {
    if (c == ue) continue;
    const double kappa = precoder_crosscorr(u.report.precoder[rbg],
                                            state.ue(cell, c).report.precoder[rbg]);
    interference += kappa * kappa;
    rank_in_use += state.ue(cell, c).report.rank;
  }

  const double sinr_eff = s / (1.0 + s * interference);
  const int headroom = cfg.max_layers * cfg.max_rank - rank_in_use;
  const int streams = std::max(0, std::min(u.report.rank, headroom));
  return cfg.rbg_bandwidth_hz * std::log2(1.0 + sinr_eff) * streams;
}

double rbg_sum_rate(const SimState& state, int cell, int rbg, std::span<const int> members) {
  double sum = 0.0;
  for (int u : members) sum += estimate_rate(state, cell, u, rbg, members);
  return sum;
}

void AllocationGrid::validate() const {
  for (int c = 0; c < n_cells_; ++c) {
    for (int m = 0; m < n_rbg_; ++m) {
      for (int l = 0; l < n_layers_; ++l) {
        const std::int32_t u = at(c, m, l);
        if (u == kNone) continue;
        if (l > 0 && at(c, m, l - 1) == kNone)
          throw std::invalid_argument("AllocationGrid: layers not filled in order");
        for (int l2 = l + 1; l2 < n_layers_; ++l2)
          if (at(c, m, l2) == u)
            throw std::invalid_argument("AllocationGrid: UE repeated on an RBG");
      }
    }
  }
}

TtiOutcome apply_allocation(SimState& state, const AllocationGrid& grid) {
  const SimConfig& cfg = state.cfg;
  grid.validate();
  if (grid.n_cells() != cfg.n_cells || grid.n_rbg() != cfg.n_rbg ||
      grid.n_layers() != cfg.max_layers)
    throw std::invalid_argument("apply_allocation: grid dimensions mismatch");

  TtiOutcome out;
  out.served_bits.resize(cfg.n_cells);
  out.inst_tput.resize(cfg.n_cells);
  out.layer_rate.resize(cfg.n_cells);
  out.cosched_count.resize(cfg.n_cells);

  for (int c = 0; c < cfg.n_cells; ++c) {
    out.served_bits[c] = Eigen::VectorXd::Zero(cfg.n_ues_per_cell);
    out.inst_tput[c] = Eigen::VectorXd::Zero(cfg.n_ues_per_cell);
    out.layer_rate[c] = Eigen::MatrixXd::Zero(cfg.n_rbg, cfg.max_layers);
    out.cosched_count[c] = Eigen::VectorXi::Zero(cfg.n_rbg);

    Eigen::VectorXd deliverable = Eigen::VectorXd::Zero(cfg.n_ues_per_cell);
    for (int m = 0; m < cfg.n_rbg; ++m) {
      std::vector<int> members = grid.scheduled_below(c, m, cfg.max_layers);
      out.cosched_count[c](m) = static_cast<int>(members.size());
      for (int l = 0; l < static_cast<int>(members.size()); ++l) {
        const double rate = estimate_rate(state, c, members[l], m, members);
        out.layer_rate[c](m, l) = rate;
        deliverable(members[l]) += rate * cfg.tti_duration_s;
      }
    }

    for (int u = 0; u < cfg.n_ues_per_cell; ++u) {
      UeState& ue = state.ue(c, u);
      const double served = std::min(ue.buffer_bytes * 8.0, deliverable(u));
      ue.buffer_bytes -= served / 8.0;
      ue.inst_tput = served / cfg.tti_duration_s;
      ue.smoothed_tput = smooth_throughput(ue.smoothed_tput, ue.inst_tput, cfg.smoothing_forget);
      ue.cum_served_bits += served;
      if (ue.busy_this_tti) ue.busy_ttis += 1;
      out.served_bits[c](u) = served;
      out.inst_tput[c](u) = ue.inst_tput;
      state.r_max = std::max(state.r_max, ue.smoothed_tput);
    }
  }

  state.tti += 1;
  return out;
}

double smooth_throughput(double r_prev, double p, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("smooth_throughput: eps must be in (0,1)");
  return (1.0 - eps) * p + eps * r_prev;
}

}  // namespace deepsched
