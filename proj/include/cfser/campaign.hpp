#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cfser/optimizer.hpp"
#include "cfser/scenario.hpp"

namespace cfser {

/// Per-drop outcome summary kept for aggregation and CSV export.
struct DropResult {
  int drop_index = 0;
  bool feasible = false;
  bool converged = false;
  bool anomaly = false;
  double objective_j = 0.0;
  double mean_se = 0.0;                // over users
  double mean_battery_fraction = 0.0;  // over users
  int iterations = 0;
  double lp_recheck = 0.0;
  std::vector<double> trace;
};

/// Aggregates over a drop set; means and errors are over feasible drops only
/// (outage_rate is over all drops).
struct Aggregates {
  int n_drops = 0;
  int n_feasible = 0;
  double outage_rate = 0.0;
  double outage_stderr = 0.0;
  double mean_objective_j = 0.0;
  double stderr_objective_j = 0.0;
  double mean_battery_fraction = 0.0;
  double stderr_battery_fraction = 0.0;
  double mean_se = 0.0;
  double stderr_se = 0.0;
};

Aggregates aggregate(const std::vector<DropResult>& drops);

/// Statistics bundle for one drop; experiments reuse it across sweep points so
/// comparisons are paired on identical realizations.
struct DropWorkspace {
  Deployment deployment;
  ChannelStats stats;
  PilotAssignment pilots;
  EstimationStats est;
};

DropWorkspace prepare_drop(const Scenario& scenario, int drop_index);
SystemParams make_system_params(const Scenario& scenario);
DropResult summarize(const OptimizerOutcome& outcome, int drop_index);

/// Runs fn(0..n-1) on a worker pool; results must be written into
/// index-addressed slots by the callers, which keeps every output independent
/// of scheduling order.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

struct CampaignResult {
  // "proposed" first, then one "ts_taud_N" series per configured variant.
  std::vector<std::pair<std::string, std::vector<DropResult>>> algorithms;
};

CampaignResult run_campaign(const Scenario& scenario, int workers);

struct ConvergenceResult {
  std::vector<double> mu_list;
  std::vector<std::vector<DropResult>> per_mu;     // [mu][drop]
  std::vector<std::vector<double>> mean_trace;     // [mu][iteration]
};

ConvergenceResult experiment_convergence(const Scenario& scenario,
                                         const std::vector<double>& mu_list,
                                         int workers);

struct RsiSweepResult {
  std::vector<double> rsi_db;
  std::vector<std::vector<DropResult>> proposed;  // [rsi][drop]
  std::vector<DropResult> ts;  // [drop]; the TS pipeline never reads the RSI
  int ts_tau_d = 0;
};

RsiSweepResult experiment_rsi_sweep(const Scenario& scenario,
                                    const std::vector<double>& rsi_grid_db,
                                    int workers);

struct OutageResult {
  std::vector<double> rate_grid;
  std::vector<std::string> algorithms;
  std::vector<std::vector<std::vector<DropResult>>> results;  // [alg][rate][drop]
};

OutageResult experiment_outage(const Scenario& scenario,
                               const std::vector<double>& rate_grid,
                               const std::vector<int>& ts_tau_d_grid,
                               int workers);

// CSV / manifest output. All numeric formatting is fixed so identical inputs
// produce byte-identical files.
void write_drops_csv(const std::string& path, const CampaignResult& result);
void write_summary_csv(const std::string& path, const CampaignResult& result);
void write_convergence_csv(const std::string& path, const ConvergenceResult& r);
void write_rsi_csvs(const std::string& dir, const RsiSweepResult& r);
void write_outage_csv(const std::string& path, const OutageResult& r);
void write_manifest(const std::string& dir, const Scenario& scenario,
                    const std::string& command, int workers);

std::string format_double(double v);

}  // namespace cfser
