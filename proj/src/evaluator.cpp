#include "deepsched/harness/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "deepsched/harness/agent_io.hpp"
#include "deepsched/nn/checkpoint.hpp"
#include "deepsched/sched/heuristics.hpp"

namespace deepsched {

namespace {

enum class SchedKind { baseline, pf_greedy, ppo_1l, sacd_2l, dsacd_1l, random_masked };

SchedKind parse_scheduler(const std::string& name) {
  if (name == "baseline") return SchedKind::baseline;
  if (name == "pf-greedy") return SchedKind::pf_greedy;
  if (name == "ppo-1l") return SchedKind::ppo_1l;
  if (name == "sacd-2l") return SchedKind::sacd_2l;
  if (name == "dsacd-1l") return SchedKind::dsacd_1l;
  if (name == "random") return SchedKind::random_masked;
  throw std::invalid_argument("eval: unknown scheduler '" + name + "'");
}

bool is_deep(SchedKind k) {
  return k == SchedKind::ppo_1l || k == SchedKind::sacd_2l || k == SchedKind::dsacd_1l;
}

bool is_one_loop(SchedKind k) { return k != SchedKind::sacd_2l; }

std::vector<int> greedy_actions(DenseNet<float>& net, const VecXf& x,
                                const std::vector<ActionMask>& masks) {
  ActionMask full;
  full.reserve(net.output_size());
  for (const auto& m : masks) full.insert(full.end(), m.begin(), m.end());
  const VecXd logits = net.forward(x).cast<double>();
  const VecXd probs = masked_softmax(logits, full, net.branch_sizes());
  std::vector<int> actions(masks.size());
  int off = 0;
  for (size_t b = 0; b < masks.size(); ++b) {
    actions[b] = argmax_branch(probs, full, off, net.branch_sizes()[b]);
    off += net.branch_sizes()[b];
  }
  return actions;
}

int random_valid_action(const ActionMask& mask, Rng& rng) {
  std::vector<int> valid;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) valid.push_back(static_cast<int>(i));
  std::uniform_int_distribution<size_t> pick(0, valid.size() - 1);
  return valid[pick(rng)];
}

void reset_accounting(SimState& state) {
  for (auto& cell : state.cells)
    for (auto& ue : cell) {
      ue.cum_served_bits = 0.0;
      ue.busy_ttis = 0;
    }
}

void schedule_tti(SimState& state, AllocationGrid& grid, SchedKind kind,
                  DenseNet<float>* actor, Rng* policy_rng) {
  const SimConfig& sim = state.cfg;
  for (int c = 0; c < sim.n_cells; ++c) {
    const std::vector<int> cands = td_select(state, c, sim.max_candidates);
    if (kind == SchedKind::baseline || kind == SchedKind::pf_greedy) {
      fds_layer1(state, cands, grid, c);
      if (kind == SchedKind::baseline)
        baseline_sds(state, cands, grid, c);
      else
        pf_greedy_sds(state, cands, grid, c);
      continue;
    }
    for (int l = 0; l < sim.max_layers; ++l) {
      LayerContext ctx{&state, &grid, c, l, cands};
      if (is_one_loop(kind)) {
        const StateBundle1L bundle = build_state_1l(ctx);
        std::vector<int> actions;
        if (kind == SchedKind::random_masked) {
          actions.resize(sim.n_rbg);
          for (int m = 0; m < sim.n_rbg; ++m)
            actions[m] = random_valid_action(bundle.masks[m], *policy_rng);
        } else {
          actions = greedy_actions(*actor, bundle.x, bundle.masks);
        }
        for (int m = 0; m < sim.n_rbg; ++m)
          if (actions[m] < static_cast<int>(ctx.candidates.size()))
            grid.assign(c, m, l, ctx.candidates[actions[m]]);
      } else {
        for (int m = 0; m < sim.n_rbg; ++m) {
          const StateBundle2L bundle = build_state_2l(ctx, m);
          const int a = greedy_actions(*actor, bundle.x, {bundle.mask})[0];
          if (a < static_cast<int>(ctx.candidates.size()))
            grid.assign(c, m, l, ctx.candidates[a]);
        }
      }
    }
  }
}

SeedKpi run_one_seed(const RunConfig& cfg, std::uint64_t seed, SchedKind kind,
                     const std::vector<std::uint8_t>* actor_blob) {
  SimConfig sim = cfg.sim;
  sim.seed = seed;
  SimState state = init_sim(sim);

  std::optional<DenseNet<float>> actor;
  if (actor_blob) actor.emplace(deserialize(*actor_blob));
  Rng policy_rng(seed * 0x6a09e667f3bcc909ULL + 17);

  CoschedAccumulator cosched;
  const int total = sim.warmup_ttis + cfg.train.eval_ttis;
  for (int t = 0; t < total; ++t) {
    advance_channel(state);
    generate_traffic(state);
    AllocationGrid grid(sim.n_cells, sim.n_rbg, sim.max_layers);
    schedule_tti(state, grid, kind, actor ? &*actor : nullptr, &policy_rng);
    apply_allocation(state, grid);
    if (state.tti == sim.warmup_ttis) {
      reset_accounting(state);
      continue;
    }
    if (state.tti > sim.warmup_ttis)
      for (int c = 0; c < sim.n_cells; ++c)
        for (int m = 0; m < sim.n_rbg; ++m) cosched.add(grid.occupied_layers(c, m));
  }

  SeedKpi out;
  out.seed = seed;
  const double span_s = cfg.train.eval_ttis * sim.tti_duration_s;
  for (int c = 0; c < sim.n_cells; ++c) {
    for (int u = 0; u < sim.n_ues_per_cell; ++u) {
      const UeState& ue = state.ue(c, u);
      out.ue_tput.push_back(ue.cum_served_bits / span_s);
      out.ue_busy.push_back(ue.busy_ttis);
      out.ue_traffic_fb.push_back(ue.traffic == TrafficModel::full_buffer ? 1 : 0);
      if (const auto v = upt(ue.cum_served_bits, ue.busy_ttis, sim.tti_duration_s))
        out.ue_upt.push_back(*v);
      else
        out.ue_upt.push_back(-1.0); // never busy: excluded from distributions
    }
  }
  out.geomean = geomean(out.ue_tput);
  out.p5 = percentile(out.ue_tput, 5.0);
  out.p50 = percentile(out.ue_tput, 50.0);
  out.cosched = cosched.efficiency();
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_seed_csv(const std::string& path, const std::string& scheduler, const RunConfig& cfg,
                    const SeedKpi& kpi) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("eval: cannot open " + path);
  f << "scheduler,seed,cell,ue,traffic,mean_tput_bps,upt_bps,busy_ttis\n";
  const int per_cell = cfg.sim.n_ues_per_cell;
  for (size_t i = 0; i < kpi.ue_tput.size(); ++i) {
    const int cell = static_cast<int>(i) / per_cell;
    const int ue = static_cast<int>(i) % per_cell;
    f << scheduler << ',' << kpi.seed << ',' << cell << ',' << ue << ','
      << (kpi.ue_traffic_fb[i] ? "fb" : "ftp3") << ',' << fmt(kpi.ue_tput[i]) << ',';
    if (kpi.ue_upt[i] >= 0.0) f << fmt(kpi.ue_upt[i]);
    f << ',' << kpi.ue_busy[i] << '\n';
  }
}

std::vector<SeedKpi> run_seeds(const RunConfig& cfg, const EvalOptions& opt, SchedKind kind,
                               const std::vector<std::uint8_t>* actor_blob) {
  std::vector<SeedKpi> results(opt.seeds.size());
  std::atomic<size_t> next{0};
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(opt.seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < opt.seeds.size(); i = next.fetch_add(1))
        results[i] = run_one_seed(cfg, opt.seeds[i], kind, actor_blob);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace

EvalResult run_eval(const RunConfig& cfg, const EvalOptions& opt) {
  const SchedKind kind = parse_scheduler(opt.scheduler);
  if (opt.seeds.empty()) throw std::invalid_argument("eval: no seeds given");

  // Checkpoint compatibility is settled before any simulation work.
  std::vector<std::uint8_t> actor_blob;
  if (is_deep(kind)) {
    if (opt.checkpoint_path.empty())
      throw std::invalid_argument("eval: scheduler '" + opt.scheduler + "' needs a checkpoint");
    const AgentCheckpoint ckpt = load_agent_checkpoint(opt.checkpoint_path);
    const auto it = ckpt.nets.find("actor");
    if (it == ckpt.nets.end()) throw std::runtime_error("eval: checkpoint has no actor net");
    actor_blob = it->second;
    DenseNet<float> actor = deserialize(actor_blob);
    const int want = is_one_loop(kind) ? state_size_1l(cfg.sim.max_candidates, cfg.sim.n_rbg)
                                       : state_size_2l(cfg.sim.max_candidates);
    if (actor.input_size() != want)
      throw std::invalid_argument(
          "eval: checkpoint input size " + std::to_string(actor.input_size()) +
          " does not match config state size " + std::to_string(want));
    const int branch = actions_per_branch(cfg.sim.max_candidates);
    const int want_out = is_one_loop(kind) ? cfg.sim.n_rbg * branch : branch;
    if (actor.output_size() != want_out)
      throw std::invalid_argument("eval: checkpoint output size does not match config");
  }

  EvalResult out;
  out.scheduler = opt.scheduler;
  out.per_seed = run_seeds(cfg, opt, kind, is_deep(kind) ? &actor_blob : nullptr);

  std::vector<double> cosched_all;
  for (const auto& kpi : out.per_seed) {
    out.pooled_tput.insert(out.pooled_tput.end(), kpi.ue_tput.begin(), kpi.ue_tput.end());
    cosched_all.push_back(kpi.cosched);
  }
  out.geomean = geomean(out.pooled_tput);
  out.p5 = percentile(out.pooled_tput, 5.0);
  out.p50 = percentile(out.pooled_tput, 50.0);
  double cs = 0.0;
  for (double v : cosched_all) cs += v;
  out.cosched = cs / static_cast<double>(cosched_all.size());

  std::vector<SeedKpi> baseline_seeds;
  if (opt.write_gains && kind != SchedKind::baseline) {
    baseline_seeds = run_seeds(cfg, opt, SchedKind::baseline, nullptr);
    std::vector<double> base_pool;
    for (const auto& kpi : baseline_seeds)
      base_pool.insert(base_pool.end(), kpi.ue_tput.begin(), kpi.ue_tput.end());
    out.gains = gain_table(out.pooled_tput, base_pool);
    out.has_gains = true;
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    for (const auto& kpi : out.per_seed)
      write_seed_csv(opt.out_dir + "/ue_tput_" + opt.scheduler + "_seed" +
                         std::to_string(kpi.seed) + ".csv",
                     opt.scheduler, cfg, kpi);

    std::ofstream summary(opt.out_dir + "/summary_" + opt.scheduler + ".csv", std::ios::trunc);
    summary << "scheduler,seed,geomean_bps,p5_bps,median_bps,cosched_efficiency\n";
    for (const auto& kpi : out.per_seed)
      summary << opt.scheduler << ',' << kpi.seed << ',' << fmt(kpi.geomean) << ','
              << fmt(kpi.p5) << ',' << fmt(kpi.p50) << ',' << fmt(kpi.cosched) << '\n';
    summary << opt.scheduler << ",all," << fmt(out.geomean) << ',' << fmt(out.p5) << ','
            << fmt(out.p50) << ',' << fmt(out.cosched) << '\n';

    if (out.has_gains) {
      std::ofstream gains(opt.out_dir + "/gains_" + opt.scheduler + ".csv", std::ios::trunc);
      gains << "statistic,gain_percent\n";
      if (out.gains.defined) {
        gains << "p5," << fmt(out.gains.p5) << "\nmedian," << fmt(out.gains.median)
              << "\ngeomean," << fmt(out.gains.geomean) << '\n';
      } else {
        gains << "p5,undefined\nmedian,undefined\ngeomean,undefined\n";
      }
    }
  }
  return out;
}

void export_cdfs(const std::string& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(run_dir)) throw std::runtime_error("export: no such run dir " + run_dir);

  // (scheduler, traffic) -> values
  std::map<std::pair<std::string, std::string>, std::vector<double>> tput, uptv;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ue_tput_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("export: no ue_tput_*.csv files in " + run_dir);

  for (const auto& path : files) {
    std::ifstream f(path);
    std::string line;
    std::getline(f, line); // header
    while (std::getline(f, line)) {
      std::istringstream ss(line);
      std::string sched, seed, cell, ue, traffic, tput_s, upt_s, busy;
      std::getline(ss, sched, ',');
      std::getline(ss, seed, ',');
      std::getline(ss, cell, ',');
      std::getline(ss, ue, ',');
      std::getline(ss, traffic, ',');
      std::getline(ss, tput_s, ',');
      std::getline(ss, upt_s, ',');
      std::getline(ss, busy, ',');
      tput[{sched, traffic}].push_back(std::stod(tput_s));
      if (!upt_s.empty()) uptv[{sched, traffic}].push_back(std::stod(upt_s));
    }
  }

  auto write_cdf = [&](const std::string& stem,
                       const std::map<std::pair<std::string, std::string>, std::vector<double>>&
                           data) {
    for (const auto& [key, values_in] : data) {
      std::vector<double> values = values_in;
      std::sort(values.begin(), values.end());
      std::ofstream f(run_dir + "/cdf_" + stem + "_" + key.first + "_" + key.second + ".csv",
                      std::ios::trunc);
      f << "value_bps,cum_fraction\n";
      for (size_t i = 0; i < values.size(); ++i)
        f << fmt(values[i]) << ',' << fmt(static_cast<double>(i + 1) / values.size()) << '\n';
    }
  };
  write_cdf("tput", tput);
  write_cdf("upt", uptv);
}

}  // namespace deepsched
