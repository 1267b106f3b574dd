#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfser/campaign.hpp"

using namespace cfser;

namespace {

Scenario tiny_scenario() {
  Scenario s;
  s.M = 6;
  s.K = 2;
  s.drops = 4;
  s.seed = 7;
  s.rate_threshold_bps_hz = 1.0;
  s.baseline->tau_d_grid = {40};
  s.baseline->rsi_sweep_tau_d = 40;
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("campaign");

TEST_CASE("scenario JSON round-trip and defaults") {
  const Scenario s = Scenario::paper_baseline();
  CHECK(s.M == 64);
  CHECK(s.K == 4);
  CHECK(s.tau_u() == 198);
  CHECK(s.noise_watts() == doctest::Approx(dbm_to_watts(-96.0)));

  const Scenario t = Scenario::from_json_text(s.to_json_string());
  CHECK(t.M == s.M);
  CHECK(t.rate_threshold_bps_hz == s.rate_threshold_bps_hz);
  CHECK(t.propagation.rician_k0_db == s.propagation.rician_k0_db);
  CHECK(t.config_hash() == s.config_hash());
}

TEST_CASE("scenario validation reports field-level errors") {
  Scenario s = Scenario::paper_baseline();
  s.M = 0;
  s.mu = 1.5;
  s.tau_p = 300;
  try {
    s.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool saw_m = false, saw_mu = false, saw_tau = false;
    for (const auto& msg : e.messages) {
      if (msg.rfind("M:", 0) == 0) saw_m = true;
      if (msg.rfind("mu:", 0) == 0) saw_mu = true;
      if (msg.rfind("tau_c:", 0) == 0) saw_tau = true;
    }
    CHECK(saw_m);
    CHECK(saw_mu);
    CHECK(saw_tau);
  }
}

TEST_CASE("unknown config fields are rejected") {
  CHECK_THROWS_AS(Scenario::from_json_text("{\"M\": 4, \"bogus\": 1}"),
                  ConfigError);
  CHECK_THROWS_AS(Scenario::from_json_text("not json"), ConfigError);
}

TEST_CASE("zero rate demand yields zero outage and zero objective") {
  Scenario s = tiny_scenario();
  s.drops = 1;
  s.rate_threshold_bps_hz = 0.0;
  const CampaignResult r = run_campaign(s, 1);
  const Aggregates a = aggregate(r.algorithms[0].second);
  CHECK(a.outage_rate == 0.0);
  CHECK(a.mean_objective_j == 0.0);
}

TEST_CASE("campaign runs both algorithms and aggregates exclude outages") {
  const Scenario s = tiny_scenario();
  const CampaignResult r = run_campaign(s, 2);
  REQUIRE(r.algorithms.size() == 2);
  CHECK(r.algorithms[0].first == "proposed");
  CHECK(r.algorithms[1].first == "ts_taud_40");
  for (const auto& [name, drops] : r.algorithms) {
    REQUIRE(drops.size() == 4);
    const Aggregates a = aggregate(drops);
    CHECK(a.n_drops == 4);
    CHECK(a.outage_rate >= 0.0);
    CHECK(a.outage_rate <= 1.0);
    CHECK(a.n_feasible + int(a.outage_rate * 4 + 0.5) == 4);
  }

  DropResult infeasible;
  infeasible.feasible = false;
  infeasible.objective_j = 1e9;
  std::vector<DropResult> mixed = r.algorithms[0].second;
  mixed.push_back(infeasible);
  const Aggregates with_outage = aggregate(mixed);
  const Aggregates without = aggregate(r.algorithms[0].second);
  CHECK(with_outage.mean_objective_j == doctest::Approx(without.mean_objective_j));
  CHECK(with_outage.n_feasible == without.n_feasible);
}

TEST_CASE("parallel and serial execution produce identical results") {
  const Scenario s = tiny_scenario();
  const CampaignResult serial = run_campaign(s, 1);
  const CampaignResult parallel = run_campaign(s, 4);
  for (std::size_t a = 0; a < serial.algorithms.size(); ++a)
    for (int i = 0; i < s.drops; ++i) {
      CHECK(serial.algorithms[a].second[std::size_t(i)].objective_j ==
            parallel.algorithms[a].second[std::size_t(i)].objective_j);
      CHECK(serial.algorithms[a].second[std::size_t(i)].mean_se ==
            parallel.algorithms[a].second[std::size_t(i)].mean_se);
    }
}

TEST_CASE("csv outputs are byte-identical across runs") {
  namespace fs = std::filesystem;
  const Scenario s = tiny_scenario();
  const fs::path dir = fs::temp_directory_path() / "cfser_csv_test";
  fs::create_directories(dir);
  const CampaignResult r1 = run_campaign(s, 3);
  const CampaignResult r2 = run_campaign(s, 2);
  write_drops_csv((dir / "a.csv").string(), r1);
  write_drops_csv((dir / "b.csv").string(), r2);
  write_summary_csv((dir / "sa.csv").string(), r1);
  write_summary_csv((dir / "sb.csv").string(), r2);
  CHECK(slurp((dir / "a.csv").string()) == slurp((dir / "b.csv").string()));
  CHECK(slurp((dir / "sa.csv").string()) == slurp((dir / "sb.csv").string()));
  CHECK(!slurp((dir / "a.csv").string()).empty());
  fs::remove_all(dir);
}

TEST_CASE("experiment sweeps carry paired drops") {
  Scenario s = tiny_scenario();
  s.drops = 2;
  const RsiSweepResult rsi =
      experiment_rsi_sweep(s, {-110.0, -90.0}, 2);
  REQUIRE(rsi.proposed.size() == 2);
  REQUIRE(rsi.proposed[0].size() == 2);
  CHECK(rsi.ts.size() == 2);
  CHECK(rsi.ts_tau_d == 40);

  const OutageResult out = experiment_outage(s, {0.5, 4.0}, {40}, 2);
  REQUIRE(out.algorithms.size() == 2);
  const Aggregates low = aggregate(out.results[0][0]);
  const Aggregates high = aggregate(out.results[0][1]);
  CHECK(low.outage_rate <= high.outage_rate + 1e-12);

  const ConvergenceResult conv = experiment_convergence(s, {0.3, 0.7}, 2);
  REQUIRE(conv.per_mu.size() == 2);
  for (const auto& trace : conv.mean_trace)
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] + 1e-7 * std::max(1.0, trace[i - 1]));
}

TEST_SUITE_END();
