#include "cfser/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfser {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& msgs) {
  std::string out = "configuration errors:";
  for (const auto& m : msgs) out += "\n  - " + m;
  return out;
}

struct FieldReader {
  const json& obj;
  const std::string prefix;
  std::vector<std::string>& errors;
  std::vector<std::string> known;

  template <typename T>
  void read(const char* key, T& target) {
    known.emplace_back(key);
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      errors.push_back(prefix + key + ": wrong type");
    }
  }

  void check_unknown() {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool found = false;
      for (const auto& k : known)
        if (k == it.key()) { found = true; break; }
      if (!found) errors.push_back(prefix + it.key() + ": unknown field");
    }
  }
};

void read_propagation(const json& j, PropagationConfig& p,
                      std::vector<std::string>& errors) {
  FieldReader r{j, "propagation.", errors, {}};
  r.read("carrier_freq_ghz", p.carrier_freq_ghz);
  r.read("bandwidth_hz", p.bandwidth_hz);
  r.read("pl_los_const_db", p.pl_los_const_db);
  r.read("pl_los_dist_coef", p.pl_los_dist_coef);
  r.read("pl_los_freq_coef", p.pl_los_freq_coef);
  r.read("pl_nlos_const_db", p.pl_nlos_const_db);
  r.read("pl_nlos_dist_coef", p.pl_nlos_dist_coef);
  r.read("pl_nlos_freq_coef", p.pl_nlos_freq_coef);
  r.read("los_near_m", p.los_near_m);
  r.read("los_far_m", p.los_far_m);
  r.read("los_decay_near_m", p.los_decay_near_m);
  r.read("los_decay_far_m", p.los_decay_far_m);
  r.read("los_far_weight", p.los_far_weight);
  r.read("shadow_sigma_los_db", p.shadow_sigma_los_db);
  r.read("shadow_sigma_nlos_db", p.shadow_sigma_nlos_db);
  r.read("rician_k0_db", p.rician_k0_db);
  r.read("rician_k_slope_db_per_m", p.rician_k_slope_db_per_m);
  r.read("user_selfloop_gain_db", p.user_selfloop_gain_db);
  r.read("ap_selfloop_gain_db", p.ap_selfloop_gain_db);
  r.read("min_pathloss_distance_m", p.min_pathloss_distance_m);
  r.check_unknown();
}

json propagation_json(const PropagationConfig& p) {
  json j;
  j["carrier_freq_ghz"] = p.carrier_freq_ghz;
  j["bandwidth_hz"] = p.bandwidth_hz;
  j["pl_los_const_db"] = p.pl_los_const_db;
  j["pl_los_dist_coef"] = p.pl_los_dist_coef;
  j["pl_los_freq_coef"] = p.pl_los_freq_coef;
  j["pl_nlos_const_db"] = p.pl_nlos_const_db;
  j["pl_nlos_dist_coef"] = p.pl_nlos_dist_coef;
  j["pl_nlos_freq_coef"] = p.pl_nlos_freq_coef;
  j["los_near_m"] = p.los_near_m;
  j["los_far_m"] = p.los_far_m;
  j["los_decay_near_m"] = p.los_decay_near_m;
  j["los_decay_far_m"] = p.los_decay_far_m;
  j["los_far_weight"] = p.los_far_weight;
  j["shadow_sigma_los_db"] = p.shadow_sigma_los_db;
  j["shadow_sigma_nlos_db"] = p.shadow_sigma_nlos_db;
  j["rician_k0_db"] = p.rician_k0_db;
  j["rician_k_slope_db_per_m"] = p.rician_k_slope_db_per_m;
  j["user_selfloop_gain_db"] = p.user_selfloop_gain_db;
  j["ap_selfloop_gain_db"] = p.ap_selfloop_gain_db;
  j["min_pathloss_distance_m"] = p.min_pathloss_distance_m;
  return j;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> msgs)
    : std::runtime_error(join(msgs)), messages(std::move(msgs)) {}

Scenario Scenario::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("invalid JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"top level must be an object"});

  Scenario s;
  std::vector<std::string> errors;
  FieldReader r{j, "", errors, {}};
  r.read("M", s.M);
  r.read("K", s.K);
  r.read("tau_p", s.tau_p);
  r.read("tau_c", s.tau_c);
  r.read("side_length_m", s.side_length_m);
  r.read("height_diff_m", s.height_diff_m);
  r.read("rho_p_watts", s.rho_p_watts);
  r.read("noise_dbm", s.noise_dbm);
  r.read("mu", s.mu);
  r.read("rsi_db", s.rsi_db);
  r.read("e_max_joules", s.e_max_joules);
  r.read("p_max_watts", s.p_max_watts);
  r.read("rate_threshold_bps_hz", s.rate_threshold_bps_hz);
  r.read("drops", s.drops);
  r.read("seed", s.seed);
  r.known.emplace_back("propagation");
  r.known.emplace_back("baseline");
  r.check_unknown();

  if (auto it = j.find("propagation"); it != j.end()) {
    if (it->is_object())
      read_propagation(*it, s.propagation, errors);
    else
      errors.push_back("propagation: must be an object");
  }
  if (auto it = j.find("baseline"); it != j.end()) {
    if (it->is_null()) {
      s.baseline.reset();
    } else if (it->is_object()) {
      BaselineConfig b;
      FieldReader rb{*it, "baseline.", errors, {}};
      rb.read("tau_d_grid", b.tau_d_grid);
      rb.read("rsi_sweep_tau_d", b.rsi_sweep_tau_d);
      rb.check_unknown();
      s.baseline = b;
    } else {
      errors.push_back("baseline: must be an object or null");
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  s.validate();
  return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Scenario::to_json_string(int indent) const {
  json j;
  j["M"] = M;
  j["K"] = K;
  j["tau_p"] = tau_p;
  j["tau_c"] = tau_c;
  j["side_length_m"] = side_length_m;
  j["height_diff_m"] = height_diff_m;
  j["rho_p_watts"] = rho_p_watts;
  j["noise_dbm"] = noise_dbm;
  j["mu"] = mu;
  j["rsi_db"] = rsi_db;
  j["e_max_joules"] = e_max_joules;
  j["p_max_watts"] = p_max_watts;
  j["rate_threshold_bps_hz"] = rate_threshold_bps_hz;
  j["drops"] = drops;
  j["seed"] = seed;
  j["propagation"] = propagation_json(propagation);
  if (baseline) {
    j["baseline"] = {{"tau_d_grid", baseline->tau_d_grid},
                     {"rsi_sweep_tau_d", baseline->rsi_sweep_tau_d}};
  } else {
    j["baseline"] = nullptr;
  }
  return j.dump(indent);
}

void Scenario::validate() const {
  std::vector<std::string> e;
  if (M < 1) e.push_back("M: must be >= 1");
  if (K < 1) e.push_back("K: must be >= 1");
  if (tau_p < 1) e.push_back("tau_p: must be >= 1");
  if (tau_c <= tau_p) e.push_back("tau_c: must exceed tau_p");
  if (!(side_length_m > 0)) e.push_back("side_length_m: must be > 0");
  if (height_diff_m < 0) e.push_back("height_diff_m: must be >= 0");
  if (!(rho_p_watts > 0)) e.push_back("rho_p_watts: must be > 0");
  if (mu < 0 || mu > 1) e.push_back("mu: must be in [0, 1]");
  if (!(rsi_db < 0)) e.push_back("rsi_db: must be < 0");
  if (!(e_max_joules > 0)) e.push_back("e_max_joules: must be > 0");
  if (!(p_max_watts > 0)) e.push_back("p_max_watts: must be > 0");
  if (rate_threshold_bps_hz < 0) e.push_back("rate_threshold_bps_hz: must be >= 0");
  if (drops < 1) e.push_back("drops: must be >= 1");
  if (baseline) {
    for (int tau_d : baseline->tau_d_grid)
      if (tau_d < 0 || tau_p + tau_d >= tau_c)
        e.push_back("baseline.tau_d_grid: each entry needs 0 <= tau_d < tau_c - tau_p");
    const int t = baseline->rsi_sweep_tau_d;
    if (t < 0 || tau_p + t >= tau_c)
      e.push_back("baseline.rsi_sweep_tau_d: needs 0 <= tau_d < tau_c - tau_p");
  }
  if (!e.empty()) throw ConfigError(std::move(e));
}

std::uint64_t Scenario::config_hash() const {
  const std::string text = to_json_string(-1);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace cfser
