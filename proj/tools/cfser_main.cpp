#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "cfser/campaign.hpp"
#include "cfser/validation.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int drops = 0;
  int workers = 0;
  bool seed_set = false, drops_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "scenario JSON file (defaults to the paper_baseline preset)");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "override scenario seed")->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--drops", o.drops, "override scenario drop count")->each([&](const std::string&) { o.drops_set = true; });
  cmd->add_option("--workers", o.workers, "worker threads (default: hardware)");
}

cfser::Scenario load_scenario(const CommonOpts& o) {
  cfser::Scenario s = o.config_path.empty()
                          ? cfser::Scenario::paper_baseline()
                          : cfser::Scenario::from_json_file(o.config_path);
  if (o.seed_set) s.seed = o.seed;
  if (o.drops_set) s.drops = o.drops;
  s.validate();
  return s;
}

int effective_workers(const CommonOpts& o) {
  if (o.workers > 0) return o.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and optimization experiments for wireless-powered cell-free "
      "networks with self-energy recycling"};
  app.require_subcommand(1);

  CommonOpts run_o, conv_o, rsi_o, out_o, val_o, dump_o;

  auto* run_cmd = app.add_subcommand("run", "full campaign: proposed protocol plus configured TS baselines");
  add_common(run_cmd, run_o);

  auto* conv_cmd = app.add_subcommand("convergence", "objective-vs-iteration traces over a harvest-efficiency list");
  add_common(conv_cmd, conv_o);
  std::string mu_csv = "0.3,0.5,0.7";
  conv_cmd->add_option("--mu-list", mu_csv, "comma-separated efficiency values")->capture_default_str();

  auto* rsi_cmd = app.add_subcommand("rsi-sweep", "battery fraction and SE versus residual SI");
  add_common(rsi_cmd, rsi_o);
  std::string rsi_csv = "-110,-105,-100,-95,-90,-85,-80";
  rsi_cmd->add_option("--rsi-grid", rsi_csv, "comma-separated RSI levels in dB")->capture_default_str();

  auto* out_cmd = app.add_subcommand("outage", "outage rate versus minimum rate demand");
  add_common(out_cmd, out_o);
  std::string rate_csv = "0.5,1,1.5,2,2.5,3,3.5,4";
  out_cmd->add_option("--rate-grid", rate_csv, "comma-separated rate demands in bits/s/Hz")->capture_default_str();

  auto* val_cmd = app.add_subcommand("validate", "sample-oracle check of every closed-form statistic");
  add_common(val_cmd, val_o);
  long long samples = 1000000;
  val_cmd->add_option("--samples", samples, "Monte-Carlo samples per instance")->capture_default_str();
  int tau_variant = 100;
  val_cmd->add_option("--tau-variant", tau_variant, "alternative sample count for the documented scaling variant")->capture_default_str();

  auto* dump_cmd = app.add_subcommand("lp-dump", "write the first-round LP of drop 0 in text form");
  add_common(dump_cmd, dump_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(run_o);
      const int workers = effective_workers(run_o);
      ensure_dir(run_o.out_dir);
      const cfser::CampaignResult r = cfser::run_campaign(s, workers);
      cfser::write_drops_csv(run_o.out_dir + "/drops.csv", r);
      cfser::write_summary_csv(run_o.out_dir + "/summary.csv", r);
      cfser::write_manifest(run_o.out_dir, s, "run", workers);
      for (const auto& [name, drops] : r.algorithms) {
        const cfser::Aggregates a = cfser::aggregate(drops);
        std::cout << name << ": outage " << a.outage_rate << ", objective "
                  << a.mean_objective_j << " J, battery fraction "
                  << a.mean_battery_fraction << ", SE " << a.mean_se
                  << " bits/s/Hz\n";
      }
    } else if (conv_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(conv_o);
      const int workers = effective_workers(conv_o);
      ensure_dir(conv_o.out_dir);
      const auto r = cfser::experiment_convergence(s, parse_grid(mu_csv), workers);
      cfser::write_convergence_csv(conv_o.out_dir + "/convergence.csv", r);
      cfser::write_manifest(conv_o.out_dir, s, "convergence", workers);
      std::cout << "wrote " << conv_o.out_dir << "/convergence.csv\n";
    } else if (rsi_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(rsi_o);
      const int workers = effective_workers(rsi_o);
      ensure_dir(rsi_o.out_dir);
      const auto r = cfser::experiment_rsi_sweep(s, parse_grid(rsi_csv), workers);
      cfser::write_rsi_csvs(rsi_o.out_dir, r);
      cfser::write_manifest(rsi_o.out_dir, s, "rsi-sweep", workers);
      std::cout << "wrote " << rsi_o.out_dir << "/battery_fraction_vs_rsi.csv and se_vs_rsi.csv\n";
    } else if (out_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(out_o);
      const int workers = effective_workers(out_o);
      ensure_dir(out_o.out_dir);
      std::vector<int> tau_d_grid = s.baseline ? s.baseline->tau_d_grid
                                               : std::vector<int>{20, 60, 100};
      const auto r = cfser::experiment_outage(s, parse_grid(rate_csv), tau_d_grid, workers);
      cfser::write_outage_csv(out_o.out_dir + "/outage_vs_rate.csv", r);
      cfser::write_manifest(out_o.out_dir, s, "outage", workers);
      std::cout << "wrote " << out_o.out_dir << "/outage_vs_rate.csv\n";
    } else if (val_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(val_o);
      ensure_dir(val_o.out_dir);
      const auto report = cfser::validate_closed_forms(s, samples, s.seed, tau_variant);
      cfser::write_report_json(report, val_o.out_dir + "/validation.json");
      cfser::write_manifest(val_o.out_dir, s, "validate", 1);
      std::cout << cfser::report_summary_text(report);
      if (!report.gate_passed()) return 2;
    } else if (dump_cmd->parsed()) {
      const cfser::Scenario s = load_scenario(dump_o);
      ensure_dir(dump_o.out_dir);
      const cfser::DropWorkspace w = cfser::prepare_drop(s, 0);
      const cfser::SystemParams sys = cfser::make_system_params(s);
      const Eigen::VectorXd rsi = Eigen::VectorXd::Constant(s.M, s.rsi_linear());
      const cfser::StatsMatrices sm = cfser::stats_matrices(w.est, w.stats, w.pilots, rsi);
      const cfser::HarvestCoefficients hc = cfser::harvest_coefficients(
          w.est, w.stats, w.pilots, s.mu, double(s.tau_u()));
      std::vector<Eigen::VectorXcd> alpha(std::size_t(s.K), Eigen::VectorXcd::Ones(s.M));
      Eigen::VectorXd gth(s.K);
      for (int k = 0; k < s.K; ++k)
        gth[k] = cfser::sinr_threshold(s.rate_threshold_bps_hz, s.tau_u(), s.tau_c);
      const cfser::LinearProgram lp = cfser::build_lp(
          sm, hc, w.est, alpha, gth, s.tau_u(), s.e_max_joules, s.p_max_watts);
      std::ofstream out(dump_o.out_dir + "/lp_drop0.txt");
      cfser::dump(lp, out);
      std::cout << "wrote " << dump_o.out_dir << "/lp_drop0.txt\n";
    }
  } catch (const cfser::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
