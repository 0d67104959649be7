#pragma once

#include <string>

namespace deepsched {

struct BenchOptions {
  std::string arch = "1l"; // 1l | 2l
  int hidden_size = 32;
  int hidden_layers = 2;
  int max_candidates = 10;
  int n_rbg = 18;
  int max_layers = 8;
  int repetitions = 2000;
  std::uint64_t seed = 1;
};

struct BenchResult {
  std::string arch;
  int input_size = 0;
  int output_size = 0;
  long long passes_per_tti = 0; // 1L: |L|; 2L: N_RBG * |L|
  double per_pass_mean_us = 0.0;
  double per_pass_min_us = 0.0;
  double per_tti_us = 0.0; // per_pass_mean * passes_per_tti
};

/// Times single-threaded float forward passes on a monotonic clock, with
/// warm-up passes excluded.
BenchResult run_bench(const BenchOptions& opt);

std::string bench_report(const BenchResult& r);

}  // namespace deepsched
