// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
// Usage: acceptance [--cli <path-to-deepsched-binary>] [--skip-training]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "deepsched/features/features.hpp"
#include "deepsched/harness/bench.hpp"
#include "deepsched/harness/evaluator.hpp"
#include "deepsched/harness/runcfg.hpp"
#include "deepsched/harness/trainer.hpp"
#include "deepsched/kpi/kpi.hpp"
#include "deepsched/rl/losses.hpp"
#include "deepsched/rl/ppo.hpp"
#include "deepsched/rl/replay.hpp"
#include "deepsched/rl/rewards.hpp"
#include "deepsched/rl/sac.hpp"
#include "deepsched/sched/heuristics.hpp"
#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"
#include "../support/stats.hpp"

using namespace deepsched;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++g_failures;
    g_notes.push_back(what);
  }
}

bool flush_criterion(int number, const std::string& title) {
  const bool ok = g_failures == 0;
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", number, title.c_str());
  for (const auto& n : g_notes) std::printf("         - %s\n", n.c_str());
  g_failures = 0;
  g_notes.clear();
  return ok;
}

bool near(double a, double b, double rel = 1e-6) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "<missing:" + path + ">";
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string tmp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("deepsched_acceptance_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

RunConfig desk_config() { return default_run_config(); }

// ---------------------------------------------------------------- criterion 1

void criterion_equation_oracles() {
  // Quantile Huber; the piecewise-rational cases are exact.
  expect(huber(0.0) == 0.0, "huber(0)");
  expect(huber(0.5) == 0.125, "huber(0.5)");
  expect(huber(2.0) == 1.5, "huber(2)");
  expect(quantile_huber(0.5, 0.5) == 0.0625, "qh(0.5, 0.5)");
  expect(quantile_huber(-0.5, 0.5) == 0.0625, "qh(-0.5, 0.5)");
  expect(near(quantile_huber(-0.5, 0.9), 0.0125), "qh(-0.5, 0.9)");
  {
    const std::vector<double> q{0.5, -0.5};
    const std::vector<double> taus{0.5, 1.0};
    std::vector<double> dq(2, 0.0);
    const double loss = critic_slice_loss<double>(q, 0.0, taus, 1.0, 0.5, true, dq);
    expect(near(loss, 0.03125), "critic slice loss hand value");
  }

  // Entropy target (natural log).
  expect(entropy_target(1, 0.999) == 0.0, "entropy target |A|=1");
  expect(near(entropy_target(11, 0.999), 0.999 * std::log(11.0)), "entropy target beta=0.999");
  expect(std::abs(entropy_target(11, 0.999) - 2.3955) < 1e-4, "entropy target 2.3955");
  expect(std::abs(entropy_target(11, 0.4) - 0.9592) < 1e-4, "entropy target 0.9592");

  // PER priority and probabilities.
  expect(near(per_priority(std::vector<double>{0, 0, 0, 0}, 1e-6), 1e-6), "priority of zeros");
  expect(near(per_priority(std::vector<double>{1, -1, 3, -3}, 1e-6), 2.0 + 1e-6),
         "priority mean of |x|");
  {
    ReplayStore store(3, 0.5);
    for (int i = 0; i < 3; ++i) {
      ExperienceTuple t;
      t.state = VecXf::Zero(1);
      t.next_state = VecXf::Zero(1);
      t.mask = {1};
      t.next_mask = {1};
      store.push(std::move(t));
    }
    store.set_priority(0, 1.0);
    store.set_priority(1, 4.0);
    store.set_priority(2, 4.0);
    expect(near(store.sample_probability(0), 0.2), "P(0) = 0.2");
    expect(near(store.sample_probability(1), 0.4), "P(1) = 0.4");
    expect(near(store.sample_probability(2), 0.4), "P(2) = 0.4");
  }

  // Reward normalization.
  {
    const std::vector<double> raw{2.0, 1.0, -4.0};
    const std::vector<std::uint8_t> noalloc{0, 0, 0};
    const auto out = reward_normalize(raw, noalloc);
    expect(out[0] == 1.0 && near(out[1], 0.5) && out[2] == -1.0, "normalize {2,1,-4}");
  }
  {
    const std::vector<double> raw{-0.5, 0.0, -2.0};
    const std::vector<std::uint8_t> noalloc{0, 1, 0};
    const auto out = reward_normalize(raw, noalloc);
    expect(out[0] == -1.0 && out[1] == 1.0 && out[2] == -1.0, "normalize all-negative");
  }

  // On-policy reward with P = G / G_max.
  expect(near(reward_ppo(5.0, 5.0, 1, 0, 0.2), 1.0), "ppo reward layer-1 max");
  expect(near(reward_ppo(5.0, 5.0, -1, 1, 0.2), -0.2), "ppo reward k*v");
  expect(near(reward_ppo(2.5, 5.0, -1, 0, 0.2), -0.5), "ppo reward P*v");
  expect(near(reward_raw(0.8e6, 1e6, 1e6, 1), -0.2), "raw PF increment");

  // JSD (base 2, mixture form).
  {
    VecXd p(3);
    p << 0.2, 0.5, 0.3;
    expect(std::abs(jsd_base2(p, p)) < 1e-12, "jsd identical = 0");
    VecXd a = VecXd::Zero(5), b = VecXd::Zero(5);
    a(0) = 1.0;
    b(3) = 1.0;
    expect(near(jsd_base2(a, b), 1.0), "jsd disjoint one-hots = 1");
    VecXd u = VecXd::Constant(4, 0.25), v(4);
    v << 0.7, 0.1, 0.1, 0.1;
    expect(near(jsd_base2(u, v), jsd_base2(v, u)), "jsd symmetry");
  }

  // Soft update.
  {
    Rng rng(1);
    DenseNet<float> one({2, 2}, {2}, rng);
    DenseNet<float> zero({2, 2}, {2}, rng);
    for (auto& l : one.layers()) {
      l.w.setOnes();
      l.b.setOnes();
    }
    for (auto& l : zero.layers()) {
      l.w.setZero();
      l.b.setZero();
    }
    DenseNet<float> copy = zero;
    soft_update(copy, one, 1.f);
    expect(copy.get_params() == one.get_params(), "soft update tau=1 copies");
    DenseNet<float> hold = zero;
    soft_update(hold, one, 0.f);
    expect(hold.get_params() == zero.get_params(), "soft update tau=0 holds");
    soft_update(zero, one, 0.001f);
    expect(near(static_cast<double>(zero.layers()[0].w(0, 0)), 0.001, 1e-6),
           "soft update tau=0.001");
  }

  // GAE oracle cases.
  {
    const std::vector<double> r{1.0, 2.0, 3.0};
    const std::vector<double> v{0.5, 1.0, 1.5};
    const auto g0 = gae(r, v, 2.0, 0.95, 0.0);
    expect(near(g0.advantages[1], 2.0 + 0.95 * 1.5 - 1.0), "gae lambda=0 TD");
    const auto g1 = gae(r, v, 2.0, 0.9, 1.0);
    const double direct = 1.0 + 0.9 * 2.0 + 0.81 * 3.0 + 0.729 * 2.0 - 0.5;
    expect(near(g1.advantages[0], direct), "gae lambda=1 discounted sum");
  }
}

// ---------------------------------------------------------------- criterion 2

void criterion_gradient_checks() {
  for (const auto& check : gradcheck::all_checks()) {
    const double err = check.run(1234);
    expect(err < 1e-4, std::string(check.name) + " max rel err " + std::to_string(err));
  }
  Rng rng(7);
  DenseNet<double> net({6, 8, 4}, {4}, rng);
  const auto x = gradcheck::random_vec(6, rng, -1, 1);
  const auto w = gradcheck::random_vec(4, rng, -1, 1);
  auto loss = [&] { return w.dot(net.forward(x)); };
  net.zero_grads();
  net.forward(x);
  net.backward(w);
  expect(gradcheck::fd_max_rel_error(net, loss, gradcheck::flat_grads(net)) < 1e-4,
         "dense net backward");
}

// ---------------------------------------------------------------- criterion 3

void criterion_brute_force() {
  Rng rng(55);
  std::uniform_real_distribution<double> tput(0.0, 2e7);
  int greedy_checked = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    SimConfig cfg;
    cfg.n_cells = 1;
    cfg.n_ues_per_cell = 8;
    cfg.n_rbg = 1 + static_cast<int>(rng() % 4);          // <= 4
    cfg.max_candidates = 2 + static_cast<int>(rng() % 4); // <= 5
    cfg.max_layers = 1 + static_cast<int>(rng() % 3);     // <= 3
    cfg.full_buffer_fraction = 1.0;
    cfg.seed = 20000 + trial;
    SimState s = init_sim(cfg);
    generate_traffic(s);
    for (int u = 0; u < cfg.n_ues_per_cell; ++u) s.ue(0, u).smoothed_tput = tput(rng);

    const std::vector<int> cands = td_select(s, 0, cfg.max_candidates);
    AllocationGrid g(1, cfg.n_rbg, cfg.max_layers);
    fds_layer1(s, cands, g, 0);
    AllocationGrid expect_grid = g;
    pf_greedy_sds(s, cands, g, 0);

    for (int m = 0; m < cfg.n_rbg; ++m) {
      for (int l = 1; l < cfg.max_layers; ++l) {
        if (expect_grid.at(0, m, l - 1) == AllocationGrid::kNone) break;
        const std::vector<int> members = expect_grid.scheduled_below(0, m, l);
        const double before = oracle::sum_rate(s, 0, m, members);
        int best = -1;
        double best_pf = -1e300;
        for (int u : cands) {
          if (expect_grid.ue_on_rbg(0, m, u)) continue;
          std::vector<int> with = members;
          with.push_back(u);
          if (!(oracle::sum_rate(s, 0, m, with) > before + 1e-9)) continue;
          const double pf = oracle::pf_sum(s, 0, m, with);
          if (pf > best_pf) {
            best_pf = pf;
            best = u;
          }
        }
        if (best < 0) break;
        expect_grid.assign(0, m, l, best);
        ++greedy_checked;
      }
    }
    for (int m = 0; m < cfg.n_rbg; ++m)
      for (int l = 0; l < cfg.max_layers; ++l)
        if (g.at(0, m, l) != expect_grid.at(0, m, l)) {
          expect(false, "pf_greedy mismatch at trial " + std::to_string(trial));
          return;
        }
  }
  expect(greedy_checked > 200, "exhaustive comparison exercised pairings");

  // better_choice_exists vs an exhaustive scan.
  for (int trial = 0; trial < 1000; ++trial) {
    SimConfig cfg;
    cfg.n_cells = 1;
    cfg.n_ues_per_cell = 8;
    cfg.n_rbg = 2;
    cfg.max_candidates = 4;
    cfg.max_layers = 2;
    cfg.full_buffer_fraction = 1.0;
    cfg.seed = 40000 + trial;
    SimState s = init_sim(cfg);
    generate_traffic(s);
    for (int u = 0; u < cfg.n_ues_per_cell; ++u) s.ue(0, u).smoothed_tput = tput(rng);

    AllocationGrid g(1, cfg.n_rbg, cfg.max_layers);
    const std::vector<int> cands = td_select(s, 0, cfg.max_candidates);
    if (cands.empty()) continue;
    LayerContext ctx{&s, &g, 0, 0, cands};
    const StateBundle1L b = build_state_1l(ctx);
    for (int m = 0; m < cfg.n_rbg; ++m) {
      std::uniform_int_distribution<int> pick(0, cfg.max_candidates);
      int chosen = pick(rng);
      while (!b.masks[m][chosen]) chosen = pick(rng);
      const auto sched = g.scheduled_below(0, m, 0);
      auto metric = [&](int a) {
        if (a >= static_cast<int>(cands.size())) return 0.0;
        return oracle::rate(s, 0, cands[a], m, sched) /
               std::max(s.ue(0, cands[a]).smoothed_tput, 1.0);
      };
      int want = 1;
      for (int a = 0; a <= cfg.max_candidates; ++a)
        if (b.masks[m][a] && a != chosen && metric(a) > metric(chosen)) want = -1;
      if (better_choice_exists(ctx, m, chosen, b.masks[m]) != want) {
        expect(false, "better_choice sign mismatch at trial " + std::to_string(trial));
        return;
      }
    }
  }
}

// ---------------------------------------------------------------- criterion 4

void criterion_masking_audit() {
  Rng rng(66);
  long long decisions = 0;
  const int per_combo = 1800;

  auto audit_probs = [&](const VecXd& probs, const ActionMask& mask, int off, int bs) {
    double sum = 0.0;
    for (int i = 0; i < bs; ++i) {
      if (!mask[off + i])
        expect(probs(off + i) == 0.0, "masked prob not exactly zero");
      else
        sum += probs(off + i);
    }
    expect(std::abs(sum - 1.0) <= 1e-9, "branch probabilities sum to 1 +- 1e-9");
  };

  for (const std::string arch : {"1l", "2l"}) {
    const int n_branches = arch == "1l" ? 4 : 1;
    const int branch = 5;
    const int input = arch == "1l" ? 24 : 17;
    const std::vector<int> branches(n_branches, branch);

    for (const std::string algo : {"ppo", "sacd", "dsacd"}) {
      PpoConfig pc;
      pc.hidden_size = 16;
      SacConfig sc;
      sc.hidden_size = 16;
      sc.variant = algo == "sacd" ? SacVariant::sacd : SacVariant::dsacd;
      sc.n_quantiles = 8;
      PpoAgent ppo(pc, input, branches, 7);
      SacAgent sac(sc, input, branches, 7);

      for (int i = 0; i < per_combo; ++i) {
        const VecXf x = gradcheck::random_vec(input, rng, 0, 1).cast<float>();
        std::vector<ActionMask> masks;
        ActionMask full;
        for (int b = 0; b < n_branches; ++b) {
          masks.push_back(gradcheck::random_mask(branch, rng));
          full.insert(full.end(), masks.back().begin(), masks.back().end());
        }
        std::vector<int> actions;
        VecXd probs;
        if (algo == "ppo") {
          actions = ppo.act(x, masks, rng, false).actions;
          probs = masked_softmax(ppo.actor().forward(x).cast<double>().eval(), full, branches);
        } else {
          actions = sac.act(x, masks, rng, false);
          probs = masked_softmax(sac.actor().forward(x).cast<double>().eval(), full, branches);
        }
        for (int b = 0; b < n_branches; ++b) {
          ++decisions;
          if (!masks[b][actions[b]]) {
            expect(false, "masked action sampled (" + algo + " " + arch + ")");
            return;
          }
          audit_probs(probs, full, b * branch, branch);
        }
      }
    }
  }
  expect(decisions >= 10000, "audited at least 10^4 decisions");
}

// ---------------------------------------------------------------- criterion 5

void criterion_per_statistics() {
  const std::vector<double> deltas{0.3, 1.0, 2.0, 5.0, 0.01, 4.0, 4.0, 7.0};
  for (const double omega : {0.0, 0.5, 1.0}) {
    ReplayStore store(deltas.size(), omega);
    for (size_t i = 0; i < deltas.size(); ++i) {
      ExperienceTuple t;
      t.state = VecXf::Zero(1);
      t.next_state = VecXf::Zero(1);
      t.mask = {1};
      t.next_mask = {1};
      store.push(std::move(t));
    }
    for (size_t i = 0; i < deltas.size(); ++i) store.set_priority(i, deltas[i]);

    std::vector<double> probs(deltas.size());
    double z = 0.0;
    for (double d : deltas) z += std::pow(d, omega);
    for (size_t i = 0; i < deltas.size(); ++i) probs[i] = std::pow(deltas[i], omega) / z;

    Rng rng(123);
    std::vector<long long> counts(deltas.size(), 0);
    for (int draw = 0; draw < 100000; ++draw) counts[store.sample_index(rng)] += 1;
    const double p = teststats::ks_pvalue(counts, probs);
    expect(p > 0.01, "KS p-value " + std::to_string(p) + " at omega " + std::to_string(omega));
  }
}

// ---------------------------------------------------------------- criterion 6

void criterion_degeneracies(double trained_max_target_gap) {
  expect(trained_max_target_gap == 0.0,
         "gamma=0 target equals reward over the training run (max gap " +
             std::to_string(trained_max_target_gap) + ")");

  SacConfig a;
  a.variant = SacVariant::sacd;
  a.n_quantiles = 1;
  a.critic_loss = CriticLossMode::quantile_huber;
  a.batch = 8;
  a.replay_capacity = 64;
  a.hidden_size = 8;
  SacConfig b = a;
  b.variant = SacVariant::dsacd;
  b.critic_loss = CriticLossMode::auto_select;
  b.n_quantiles = 1;

  SacAgent sacd(a, 6, {5}, 77);
  SacAgent dsacd(b, 6, {5}, 77);
  Rng ta(6), tb(6), ra(5), rb(5);
  auto rand_tuple = [](Rng& rng) {
    ExperienceTuple t;
    t.state = gradcheck::random_vec(6, rng, 0, 1).cast<float>();
    t.next_state = gradcheck::random_vec(6, rng, 0, 1).cast<float>();
    t.mask = gradcheck::random_mask(5, rng);
    t.next_mask = gradcheck::random_mask(5, rng);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    t.reward = static_cast<float>(unif(rng));
    std::vector<int> valid;
    for (int k = 0; k < 5; ++k)
      if (t.mask[k]) valid.push_back(k);
    t.action = valid[static_cast<size_t>(rng() % valid.size())];
    return t;
  };
  for (int i = 0; i < 32; ++i) {
    sacd.observe(rand_tuple(ta));
    dsacd.observe(rand_tuple(tb));
  }
  for (int step = 0; step < 20; ++step) {
    sacd.update(0.7, ra);
    dsacd.update(0.7, rb);
  }
  expect(sacd.actor().get_params() == dsacd.actor().get_params(),
         "SACD actor == DSACD(N=1) actor");
  expect(sacd.critic(0).get_params() == dsacd.critic(0).get_params(),
         "SACD critic1 == DSACD(N=1) critic1");
  expect(sacd.critic(1).get_params() == dsacd.critic(1).get_params(),
         "SACD critic2 == DSACD(N=1) critic2");
  expect(sacd.alpha() == dsacd.alpha(), "entropy coefficients identical");
}

// ---------------------------------------------------------------- criterion 7

void criterion_complexity() {
  BenchOptions opt;
  opt.max_candidates = 4;
  opt.n_rbg = 6;
  opt.max_layers = 2;
  opt.hidden_size = 256; // comparable per-pass cost for the ratio check
  opt.repetitions = 6000;

  opt.arch = "1l";
  const BenchResult one = run_bench(opt);
  opt.arch = "2l";
  const BenchResult two = run_bench(opt);
  expect(one.passes_per_tti == opt.max_layers, "1L pass count |L|");
  expect(two.passes_per_tti == static_cast<long long>(opt.n_rbg) * opt.max_layers,
         "2L pass count N_RBG x |L|");

  const double ratio = two.per_tti_us / one.per_tti_us;
  expect(ratio >= 0.5 * opt.n_rbg && ratio <= 2.0 * opt.n_rbg,
         "2L/1L per-TTI ratio " + std::to_string(ratio) + " within [0.5, 2.0] x N_RBG");

  expect(near(one.per_tti_us, one.per_pass_mean_us * one.passes_per_tti, 1e-9),
         "per-TTI identity (1L)");
  expect(near(two.per_tti_us, two.per_pass_mean_us * two.passes_per_tti, 1e-9),
         "per-TTI identity (2L)");

  // Paper-scale pass counts: 18 RBGs x 8 layers.
  BenchOptions w;
  w.arch = "1l";
  w.max_candidates = 10;
  w.n_rbg = 18;
  w.max_layers = 8;
  w.repetitions = 6000;
  w.hidden_size = 32;
  const BenchResult h32 = run_bench(w);
  expect(h32.passes_per_tti == 8, "1L pass count at 18 RBG x 8 layers");
  {
    BenchOptions two = w;
    two.arch = "2l";
    two.repetitions = 512;
    expect(run_bench(two).passes_per_tti == 144, "2L pass count at 18 RBG x 8 layers");
  }
  // Width ordering at paper-scale input sizes: 32 hidden beats 64 hidden.
  w.hidden_size = 64;
  const BenchResult h64 = run_bench(w);
  expect(h32.per_pass_min_us < h64.per_pass_min_us,
         "1L(32) per-pass " + std::to_string(h32.per_pass_min_us) + "us < 1L(64) " +
             std::to_string(h64.per_pass_min_us) + "us");
}

// ---------------------------------------------------------------- criterion 8

struct TrainingArtifacts {
  std::map<std::string, std::string> checkpoints; // scheduler name -> path
  TrainResult dsacd_result;
};

// Desk-scale training calibration: the sim profile is the desk default; the
// optimizer settings are scaled for 2000-TTI convergence at this size (the
// paper-table values stay the config defaults).
RunConfig desk_training_config(const std::string& algo) {
  RunConfig cfg = desk_config();
  if (algo == "ppo") {
    cfg.train.jsd_steps_per_update = 16;
    cfg.train.hidden_layer_size = 96;
  } else {
    cfg.train.sac_updates_per_tti = 16;
    cfg.train.sac_actor_lr = 1e-3;
    cfg.train.sac_critic_lr = 1e-3;
    cfg.train.hidden_layer_size = algo == "dsacd" ? 112 : 32;
  }
  return cfg;
}

TrainingArtifacts run_trainings(const std::string& dir) {
  TrainingArtifacts out;
  struct Spec {
    const char* algo;
    const char* arch;
  };
  for (const Spec& spec : {Spec{"ppo", "1l"}, Spec{"sacd", "2l"}, Spec{"dsacd", "1l"}}) {
    TrainOptions opt;
    opt.algo = spec.algo;
    opt.arch = spec.arch;
    opt.out_dir = dir + "/" + spec.algo + "_" + spec.arch;
    const TrainResult res = train_agent(desk_training_config(spec.algo), opt);
    out.checkpoints[std::string(spec.algo) + "-" + spec.arch] = res.checkpoint_path;
    if (std::string(spec.algo) == "dsacd") out.dsacd_result = res;
  }
  return out;
}

void criterion_training(const TrainingArtifacts& art) {
  RunConfig cfg = desk_config();
  const std::vector<std::uint64_t> heuristic_seeds{11, 12, 13, 14};
  const std::vector<std::uint64_t> held_out{101, 102, 103, 104};

  // (a) PF-greedy never worse than baseline by > 1% on any seed.
  {
    EvalOptions base;
    base.scheduler = "baseline";
    base.seeds = heuristic_seeds;
    base.write_gains = false;
    const EvalResult b = run_eval(cfg, base);
    EvalOptions greedy = base;
    greedy.scheduler = "pf-greedy";
    const EvalResult g = run_eval(cfg, greedy);
    for (size_t i = 0; i < heuristic_seeds.size(); ++i) {
      const double ratio = g.per_seed[i].geomean / b.per_seed[i].geomean;
      expect(ratio >= 0.99, "pf-greedy geomean ratio " + std::to_string(ratio) + " on seed " +
                                std::to_string(heuristic_seeds[i]));
    }
  }

  // (b) Trained deep schedulers vs random and baseline on held-out seeds.
  {
    EvalOptions base;
    base.seeds = held_out;
    base.write_gains = false;
    base.scheduler = "baseline";
    const EvalResult b = run_eval(cfg, base);
    EvalOptions rnd = base;
    rnd.scheduler = "random";
    const EvalResult r = run_eval(cfg, rnd);

    for (const auto& [name, ckpt] : art.checkpoints) {
      EvalOptions deep = base;
      deep.scheduler = name;
      deep.checkpoint_path = ckpt;
      const EvalResult d = run_eval(cfg, deep);
      const double vs_random = d.geomean / r.geomean;
      const double vs_baseline = d.geomean / b.geomean;
      expect(vs_random >= 1.5,
             name + " geomean " + std::to_string(d.geomean) + " vs random " +
                 std::to_string(r.geomean) + " (x" + std::to_string(vs_random) + ")");
      expect(vs_baseline >= 0.9,
             name + " geomean reaches 90% of baseline (x" + std::to_string(vs_baseline) + ")");
    }
  }

  // (c) DSACD-1L windowed geomean trend over the final 50% of training.
  {
    const auto& curve = art.dsacd_result.windowed_geomean;
    expect(curve.size() > 100, "training curve recorded");
    const std::vector<double> tail(curve.begin() + curve.size() / 2, curve.end());
    const double slope = teststats::ls_slope(tail);
    expect(slope > 0.0, "windowed geomean slope " + std::to_string(slope));
  }
}

// ---------------------------------------------------------------- criterion 9

void criterion_kpi(const std::string& dir) {
  expect(near(geomean(std::vector<double>{0.0, 4.0}), 2.0), "zero replacement");
  expect(near(geomean(std::vector<double>{2.0, 8.0}), 4.0), "geomean {2,8}");
  {
    Rng rng(3);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(6);
      for (auto& x : v) x = (rng() % 4 == 0) ? 0.0 : unif(rng);
      std::vector<double> repl = v;
      for (auto& x : repl)
        if (x == 0.0) x = 1.0;
      double am = 0.0;
      for (double x : repl) am += x;
      am /= repl.size();
      expect(geomean(v) <= am + 1e-9, "AM-GM");
    }
  }
  expect(*upt(1e6, 1000, 5e-4) == 2.0 * *upt(1e6, 2000, 5e-4), "UPT busy definition");
  expect(!upt(0.0, 0, 5e-4).has_value(), "never-busy excluded");
  expect(near(percentile(std::vector<double>{1, 3}, 50.0), 2.0), "median");

  // CDF export monotonicity on a synthetic fixture.
  RunConfig cfg = desk_config();
  cfg.train.eval_ttis = 60;
  cfg.sim.warmup_ttis = 10;
  EvalOptions opt;
  opt.scheduler = "baseline";
  opt.seeds = {3};
  opt.write_gains = false;
  opt.out_dir = dir + "/kpi_fixture";
  run_eval(cfg, opt);
  export_cdfs(opt.out_dir);
  bool found = false;
  for (const auto& entry : std::filesystem::directory_iterator(opt.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cdf_", 0) != 0) continue;
    found = true;
    std::ifstream f(entry.path());
    std::string line;
    std::getline(f, line);
    double pv = -1e300, pc = -1.0, lc = 0.0;
    while (std::getline(f, line)) {
      const auto comma = line.find(',');
      const double v = std::stod(line.substr(0, comma));
      const double c = std::stod(line.substr(comma + 1));
      expect(v >= pv && c >= pc, "CDF monotone");
      pv = v;
      pc = c;
      lc = c;
    }
    expect(near(lc, 1.0), "CDF ends at 1");
  }
  expect(found, "CDF files written");
}

// --------------------------------------------------------------- criterion 10

void criterion_determinism(const std::string& cli, const std::string& dir) {
  if (cli.empty()) {
    expect(false, "no --cli binary given");
    return;
  }
  const std::string out_a = dir + "/det_a";
  const std::string out_b = dir + "/det_b";
  for (const std::string& out : {out_a, out_b}) {
    const std::string cmd = cli + " eval --scheduler baseline --seeds 5 6 --out " + out +
                            " > " + out + ".log 2>&1";
    const int rc = std::system(cmd.c_str());
    expect(rc == 0, "cli eval exit code " + std::to_string(rc));
  }
  int compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out_a)) {
    const std::string name = entry.path().filename().string();
    const std::string a = slurp(out_a + "/" + name);
    const std::string b = slurp(out_b + "/" + name);
    expect(a == b, "byte-identical " + name);
    ++compared;
  }
  expect(compared >= 3, "KPI CSVs compared");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  bool skip_training = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    if (arg == "--skip-training") skip_training = true;
  }
  const std::string dir = tmp_dir("run");
  int failed = 0;

  criterion_equation_oracles();
  failed += !flush_criterion(1, "equation oracle suite (rel. tol 1e-6)");

  criterion_gradient_checks();
  failed += !flush_criterion(2, "gradient checks vs central finite differences (< 1e-4)");

  criterion_brute_force();
  failed += !flush_criterion(3, "brute-force equivalence of pf-greedy and v_m over 10^3 draws");

  criterion_masking_audit();
  failed += !flush_criterion(4, "masking audit over 10^4 agent decisions");

  criterion_per_statistics();
  failed += !flush_criterion(5, "PER sampling statistics (KS p > 0.01, omega in {0, 0.5, 1})");

  TrainingArtifacts art;
  if (!skip_training) {
    art = run_trainings(dir);
    criterion_degeneracies(art.dsacd_result.max_abs_target_minus_reward);
    failed += !flush_criterion(6, "gamma=0 and N=1 degeneracy identities");
  } else {
    std::printf("[SKIP] criterion 6 (training skipped)\n");
  }

  criterion_complexity();
  failed += !flush_criterion(7, "forward-pass complexity arithmetic");

  if (!skip_training) {
    criterion_training(art);
    failed += !flush_criterion(8, "desk-scale training beats random and tracks the baseline");
  } else {
    std::printf("[SKIP] criterion 8 (training skipped)\n");
  }

  criterion_kpi(dir);
  failed += !flush_criterion(9, "KPI correctness on synthetic fixtures");

  criterion_determinism(cli, dir);
  failed += !flush_criterion(10, "end-to-end determinism of cli eval outputs");

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
