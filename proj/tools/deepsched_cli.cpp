#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "deepsched/harness/bench.hpp"
#include "deepsched/harness/evaluator.hpp"
#include "deepsched/harness/runcfg.hpp"
#include "deepsched/harness/trainer.hpp"

namespace {

deepsched::RunConfig load_or_default(const std::string& path) {
  return path.empty() ? deepsched::default_run_config() : deepsched::load_run_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepsched: desk-scale downlink MU-MIMO scheduling testbed"};
  app.require_subcommand(1);

  std::string config_path, out_dir, algo = "dsacd", arch = "1l";
  auto* train = app.add_subcommand("train", "train a deep scheduler");
  train->add_option("--config", config_path, "run config file (key = value)");
  train->add_option("--algo", algo, "ppo | sacd | dsacd")
      ->check(CLI::IsMember({"ppo", "sacd", "dsacd"}));
  train->add_option("--arch", arch, "1l | 2l")->check(CLI::IsMember({"1l", "2l"}));
  train->add_option("--out", out_dir, "output directory")->required();

  std::string scheduler = "baseline", checkpoint;
  std::vector<std::uint64_t> seeds{1};
  bool no_gains = false;
  auto* eval = app.add_subcommand("eval", "evaluate a scheduler over seeds");
  eval->add_option("--config", config_path, "run config file");
  eval->add_option("--scheduler", scheduler, "baseline | pf-greedy | ppo-1l | sacd-2l | dsacd-1l | random")
      ->check(CLI::IsMember(deepsched::eval_scheduler_names()));
  eval->add_option("--checkpoint", checkpoint, "agent checkpoint (deep schedulers)");
  eval->add_option("--seeds", seeds, "simulation seeds");
  eval->add_option("--out", out_dir, "output directory")->required();
  eval->add_flag("--no-gains", no_gains, "skip the baseline gain table");

  deepsched::BenchOptions bopt;
  std::string bench_arch = "both";
  auto* bench = app.add_subcommand("bench", "time actor forward passes");
  bench->add_option("--arch", bench_arch, "1l | 2l | both")
      ->check(CLI::IsMember({"1l", "2l", "both"}));
  bench->add_option("--hidden", bopt.hidden_size, "hidden layer size");
  bench->add_option("--hidden-layers", bopt.hidden_layers, "hidden layer count");
  bench->add_option("--max-ues", bopt.max_candidates, "|U|");
  bench->add_option("--nrbg", bopt.n_rbg, "N_RBG");
  bench->add_option("--layers", bopt.max_layers, "|L|");
  bench->add_option("--reps", bopt.repetitions, "timed passes");

  std::string run_dir;
  auto* exp = app.add_subcommand("export", "emit sorted throughput CDFs for a run directory");
  exp->add_option("--run-dir", run_dir, "eval output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (train->parsed()) {
      deepsched::TrainOptions opt;
      opt.algo = algo;
      opt.arch = arch;
      opt.out_dir = out_dir;
      const auto result = deepsched::train_agent(load_or_default(config_path), opt);
      std::printf("checkpoint: %s\n", result.checkpoint_path.c_str());
      if (!result.windowed_geomean.empty())
        std::printf("final windowed geomean: %.6g bit/s\n", result.windowed_geomean.back());
    } else if (eval->parsed()) {
      deepsched::EvalOptions opt;
      opt.scheduler = scheduler;
      opt.checkpoint_path = checkpoint;
      opt.seeds = seeds;
      opt.out_dir = out_dir;
      opt.write_gains = !no_gains;
      const auto result = deepsched::run_eval(load_or_default(config_path), opt);
      std::printf("%s: geomean=%.6g p5=%.6g median=%.6g cosched=%.4f (%zu seeds)\n",
                  result.scheduler.c_str(), result.geomean, result.p5, result.p50,
                  result.cosched, result.per_seed.size());
      if (result.has_gains && result.gains.defined)
        std::printf("gains vs baseline: p5=%+.2f%% median=%+.2f%% geomean=%+.2f%%\n",
                    result.gains.p5, result.gains.median, result.gains.geomean);
    } else if (bench->parsed()) {
      std::vector<std::string> arches =
          bench_arch == "both" ? std::vector<std::string>{"1l", "2l"}
                               : std::vector<std::string>{bench_arch};
      for (const auto& a : arches) {
        deepsched::BenchOptions o = bopt;
        o.arch = a;
        std::printf("%s\n", deepsched::bench_report(deepsched::run_bench(o)).c_str());
      }
    } else if (exp->parsed()) {
      deepsched::export_cdfs(run_dir);
      std::printf("wrote CDF files into %s\n", run_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
