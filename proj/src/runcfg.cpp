#include "deepsched/harness/runcfg.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace deepsched {

namespace {

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
T parse_num(const std::string& v) {
  std::istringstream ss(v);
  T out;
  ss >> out;
  if (ss.fail()) throw std::invalid_argument("config: cannot parse value '" + v + "'");
  return out;
}

template <class T>
std::string fmt_num(T v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    auto sim = [&f](const std::string& name, auto member_ptr) {
      f[name] = Field{
          [member_ptr](RunConfig& c, const std::string& v) {
            c.sim.*member_ptr =
                parse_num<std::remove_reference_t<decltype(c.sim.*member_ptr)>>(v);
          },
          [member_ptr](const RunConfig& c) { return fmt_num(c.sim.*member_ptr); }};
    };
    auto train = [&f](const std::string& name, auto member_ptr) {
      f[name] = Field{
          [member_ptr](RunConfig& c, const std::string& v) {
            c.train.*member_ptr =
                parse_num<std::remove_reference_t<decltype(c.train.*member_ptr)>>(v);
          },
          [member_ptr](const RunConfig& c) { return fmt_num(c.train.*member_ptr); }};
    };
    sim("n_cells", &SimConfig::n_cells);
    sim("n_ues_per_cell", &SimConfig::n_ues_per_cell);
    sim("n_rbg", &SimConfig::n_rbg);
    sim("max_scheduled_ues", &SimConfig::max_candidates);
    sim("max_ue_layers", &SimConfig::max_layers);
    sim("max_ue_rank", &SimConfig::max_rank);
    sim("rbg_bandwidth_hz", &SimConfig::rbg_bandwidth_hz);
    sim("tti_duration_s", &SimConfig::tti_duration_s);
    sim("full_buffer_fraction", &SimConfig::full_buffer_fraction);
    sim("ftp3_packet_bytes", &SimConfig::ftp3_packet_bytes);
    sim("ftp3_rate_pps", &SimConfig::ftp3_rate_pps);
    sim("smoothing_forget", &SimConfig::smoothing_forget);
    sim("b_max_bytes", &SimConfig::b_max_bytes);
    sim("seed", &SimConfig::seed);
    sim("warmup_ttis", &SimConfig::warmup_ttis);
    sim("n_antennas", &SimConfig::n_antennas);
    sim("fading_persistence", &SimConfig::fading_persistence);
    sim("tx_power_dbm", &SimConfig::tx_power_dbm);
    sim("noise_power_dbm", &SimConfig::noise_power_dbm);
    sim("intercell_interference_dbm", &SimConfig::intercell_interference_dbm);
    sim("pathloss_ref_db", &SimConfig::pathloss_ref_db);
    sim("pathloss_exponent", &SimConfig::pathloss_exponent);
    sim("ref_distance_m", &SimConfig::ref_distance_m);
    sim("cell_radius_m", &SimConfig::cell_radius_m);
    sim("shadowing_std_db", &SimConfig::shadowing_std_db);
    sim("cqi_sinr_lo_db", &SimConfig::cqi_sinr_lo_db);
    sim("cqi_sinr_hi_db", &SimConfig::cqi_sinr_hi_db);

    train("ppo_discount_factor", &TrainConfig::ppo_discount);
    train("gae_lambda", &TrainConfig::gae_lambda);
    train("ppo_clip_epsilon", &TrainConfig::ppo_clip_epsilon);
    train("entropy_coef", &TrainConfig::entropy_coef);
    train("reward_scaling_k", &TrainConfig::reward_scaling_k);
    train("ppo_batch_size", &TrainConfig::ppo_batch_size);
    train("jsd_batch_size", &TrainConfig::jsd_batch_size);
    train("expert_buffer_size", &TrainConfig::expert_buffer_size);
    train("expert_smoothing", &TrainConfig::expert_smoothing);
    train("ppo_actor_lr", &TrainConfig::ppo_actor_lr);
    train("ppo_critic_lr", &TrainConfig::ppo_critic_lr);
    train("jsd_lr", &TrainConfig::jsd_lr);
    train("sac_discount_factor", &TrainConfig::sac_discount);
    train("sac_batch_size", &TrainConfig::sac_batch_size);
    train("sac_actor_lr", &TrainConfig::sac_actor_lr);
    train("sac_critic_lr", &TrainConfig::sac_critic_lr);
    train("critic_quantiles", &TrainConfig::critic_quantiles);
    train("prioritized_replay_omega", &TrainConfig::prioritized_replay_omega);
    train("per_epsilon", &TrainConfig::per_epsilon);
    train("target_smoothing_coef", &TrainConfig::target_smoothing_coef);
    train("target_entropy_beta_1l", &TrainConfig::target_entropy_beta_1l);
    train("target_entropy_beta_2l", &TrainConfig::target_entropy_beta_2l);
    train("alpha_init", &TrainConfig::alpha_init);
    train("alpha_lr", &TrainConfig::alpha_lr);
    train("replay_buffer_per_cell", &TrainConfig::replay_buffer_per_cell);
    train("omega_prime_start", &TrainConfig::omega_prime_start);
    train("omega_prime_end", &TrainConfig::omega_prime_end);
    train("sac_updates_per_tti", &TrainConfig::sac_updates_per_tti);
    train("jsd_steps_per_update", &TrainConfig::jsd_steps_per_update);
    train("hidden_layers", &TrainConfig::hidden_layers);
    train("hidden_layer_size", &TrainConfig::hidden_layer_size);
    train("train_ttis", &TrainConfig::train_ttis);
    train("eval_ttis", &TrainConfig::eval_ttis);
    train("augmentation_copies", &TrainConfig::augmentation_copies);
    train("curve_window", &TrainConfig::curve_window);
    return f;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  it->second.set(cfg, value);
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg = default_run_config();
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key = value");
    apply_key_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.sim.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_string(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& [name, field] : fields()) out << name << " = " << field.get(cfg) << "\n";
  return out.str();
}

}  // namespace deepsched
