#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfser/common.hpp"
#include "cfser/propagation.hpp"

namespace cfser {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> msgs);
  std::vector<std::string> messages;
};

struct BaselineConfig {
  std::vector<int> tau_d_grid = {20, 60, 100};  // outage-curve variants
  int rsi_sweep_tau_d = 100;                    // single variant for RSI sweeps
};

/// All physical and protocol parameters of a campaign. Defaults are the
/// paper_baseline preset: 64 APs, 4 users on a 100 m wrap-around square,
/// 2-sample pilots in a 200-sample coherence interval, 0.1 W pilots, -96 dBm
/// noise, 0.2 J batteries, 1 W AP power, mu = 0.5.
struct Scenario {
  int M = 64;
  int K = 4;
  int tau_p = 2;
  int tau_c = 200;
  double side_length_m = 100.0;
  double height_diff_m = 4.0;
  double rho_p_watts = 0.1;
  double noise_dbm = -96.0;
  double mu = 0.5;
  double rsi_db = -90.0;
  double e_max_joules = 0.2;
  double p_max_watts = 1.0;
  double rate_threshold_bps_hz = 2.5;
  int drops = 500;
  std::uint64_t seed = 1;
  PropagationConfig propagation;
  std::optional<BaselineConfig> baseline = BaselineConfig{};

  int tau_u() const { return tau_c - tau_p; }
  double noise_watts() const { return dbm_to_watts(noise_dbm); }
  double rsi_linear() const { return db_to_linear(rsi_db); }

  static Scenario paper_baseline() { return Scenario{}; }

  /// Throws ConfigError (field-level messages) on parse or validation errors.
  static Scenario from_json_file(const std::string& path);
  static Scenario from_json_text(const std::string& text);

  std::string to_json_string(int indent = 2) const;
  void validate() const;
  std::uint64_t config_hash() const;
};

}  // namespace cfser
