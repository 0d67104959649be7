#pragma once

#include <string>
#include <vector>

#include "deepsched/harness/runcfg.hpp"

namespace deepsched {

struct TrainOptions {
  std::string algo = "dsacd"; // ppo | sacd | dsacd
  std::string arch = "1l";    // 1l | 2l
  std::string out_dir;        // empty: no files written
};

struct TrainResult {
  std::string checkpoint_path;
  std::vector<double> tti_geomean;      // per post-warmup TTI, all-UE geomean
  std::vector<double> windowed_geomean; // running window mean of the above
  long long tuples_recorded = 0;        // decision tuples created (off-policy)
  long long emitting_ttis = 0;
  double max_abs_target_minus_reward = 0.0; // over every update of the run
  double final_alpha = 0.0;
};

/// Centralized training: one shared agent collects decision tuples from every
/// cell each TTI and updates in place. Writes a checkpoint and a training
/// curve CSV into out_dir when given.
TrainResult train_agent(const RunConfig& cfg, const TrainOptions& opt);

}  // namespace deepsched
