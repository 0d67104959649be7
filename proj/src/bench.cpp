#include "deepsched/harness/bench.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

#include "deepsched/features/features.hpp"
#include "deepsched/nn/dense_net.hpp"

namespace deepsched {

BenchResult run_bench(const BenchOptions& opt) {
  if (opt.arch != "1l" && opt.arch != "2l")
    throw std::invalid_argument("bench: arch must be 1l or 2l");
  const bool one_loop = opt.arch == "1l";
  const int branch = actions_per_branch(opt.max_candidates);

  BenchResult r;
  r.arch = opt.arch;
  r.input_size = one_loop ? state_size_1l(opt.max_candidates, opt.n_rbg)
                          : state_size_2l(opt.max_candidates);
  r.output_size = one_loop ? opt.n_rbg * branch : branch;
  r.passes_per_tti = one_loop ? opt.max_layers
                              : static_cast<long long>(opt.n_rbg) * opt.max_layers;

  std::vector<int> sizes{r.input_size};
  for (int i = 0; i < opt.hidden_layers; ++i) sizes.push_back(opt.hidden_size);
  sizes.push_back(r.output_size);
  std::vector<int> branches =
      one_loop ? std::vector<int>(opt.n_rbg, branch) : std::vector<int>{branch};

  Rng rng(opt.seed);
  DenseNet<float> net(sizes, branches, rng);
  std::uniform_real_distribution<float> unif(0.f, 1.f);
  VecXf x(r.input_size);
  for (int i = 0; i < r.input_size; ++i) x(i) = unif(rng);

  volatile float sink = 0.f;
  float acc = 0.f;
  for (int i = 0; i < 100; ++i) acc += net.forward(x)(0); // warm-up, excluded
  sink = acc;

  using clock = std::chrono::steady_clock;
  constexpr int kBlock = 32;
  const int blocks = std::max(1, opt.repetitions / kBlock);
  double total_us = 0.0;
  double min_us = 1e300;
  for (int blk = 0; blk < blocks; ++blk) {
    const auto t0 = clock::now();
    for (int i = 0; i < kBlock; ++i) acc += net.forward(x)(0);
    const auto t1 = clock::now();
    sink = acc;
    const double us =
        std::chrono::duration_cast<std::chrono::duration<double, std::micro>>(t1 - t0).count() /
        kBlock;
    total_us += us;
    min_us = std::min(min_us, us);
  }
  (void)sink;

  r.per_pass_mean_us = total_us / blocks;
  r.per_pass_min_us = min_us;
  r.per_tti_us = r.per_pass_mean_us * static_cast<double>(r.passes_per_tti);
  return r;
}

std::string bench_report(const BenchResult& r) {
  std::ostringstream ss;
  ss << "arch=" << r.arch << " input=" << r.input_size << " output=" << r.output_size
     << " passes_per_tti=" << r.passes_per_tti << " per_pass_mean_us=" << r.per_pass_mean_us
     << " per_pass_min_us=" << r.per_pass_min_us << " per_tti_us=" << r.per_tti_us;
  return ss.str();
}

}  // namespace deepsched
