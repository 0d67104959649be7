#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepsched/harness/runcfg.hpp"
#include "deepsched/kpi/kpi.hpp"

namespace deepsched {

inline const std::vector<std::string>& eval_scheduler_names() {
  static const std::vector<std::string> names{"baseline", "pf-greedy", "ppo-1l",
                                              "sacd-2l",  "dsacd-1l",  "random"};
  return names;
}

struct EvalOptions {
  std::string scheduler = "baseline";
  std::vector<std::uint64_t> seeds{1};
  std::string checkpoint_path; // required for deep schedulers
  std::string out_dir;         // empty: no files written
  bool write_gains = true;     // run baseline on the same seeds for gain rows
};

struct SeedKpi {
  std::uint64_t seed = 0;
  std::vector<double> ue_tput; // per-UE mean served throughput, bits/s
  std::vector<double> ue_upt;  // busy UEs only
  std::vector<long long> ue_busy;
  std::vector<int> ue_traffic_fb; // 1 = full buffer
  double geomean = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  double cosched = 0.0;
};

struct EvalResult {
  std::string scheduler;
  std::vector<SeedKpi> per_seed;
  std::vector<double> pooled_tput;
  double geomean = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  double cosched = 0.0;
  bool has_gains = false;
  GainRow gains;
};

/// Runs every seed (worker threads, outputs buffered and written in seed
/// order), aggregates KPIs and writes per-UE distribution CSVs plus a summary
/// and a gain table against the baseline run.
EvalResult run_eval(const RunConfig& cfg, const EvalOptions& opt);

/// Rewrites a run directory's per-UE distributions as sorted CDF files
/// (value, cumulative fraction), one per scheduler per traffic model.
void export_cdfs(const std::string& run_dir);

}  // namespace deepsched
