#include "cfser/campaign.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

namespace cfser {

namespace {

// Substream ids per drop phase.
enum : std::uint64_t { kGeometry = 1, kPropagation = 2, kPilots = 3 };

double mean_of(const Eigen::VectorXd& v) {
  return v.size() ? v.mean() : 0.0;
}

struct Welford {
  int n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double stderr_() const {
    return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
  }
};

}  // namespace

Aggregates aggregate(const std::vector<DropResult>& drops) {
  Aggregates a;
  a.n_drops = static_cast<int>(drops.size());
  Welford obj, frac, se;
  for (const auto& d : drops) {
    if (!d.feasible) continue;
    ++a.n_feasible;
    obj.add(d.objective_j);
    frac.add(d.mean_battery_fraction);
    se.add(d.mean_se);
  }
  if (a.n_drops > 0) {
    const double p = double(a.n_drops - a.n_feasible) / a.n_drops;
    a.outage_rate = p;
    a.outage_stderr = std::sqrt(p * (1.0 - p) / a.n_drops);
  }
  a.mean_objective_j = obj.mean;
  a.stderr_objective_j = obj.stderr_();
  a.mean_battery_fraction = frac.mean;
  a.stderr_battery_fraction = frac.stderr_();
  a.mean_se = se.mean;
  a.stderr_se = se.stderr_();
  return a;
}

DropWorkspace prepare_drop(const Scenario& scenario, int drop_index) {
  DropWorkspace w;
  const std::uint64_t drop = static_cast<std::uint64_t>(drop_index);
  w.deployment = generate_deployment(
      scenario.M, scenario.K, scenario.side_length_m, scenario.height_diff_m,
      substream_seed(scenario.seed, drop, kGeometry));
  w.stats = compute_channel_stats(w.deployment, scenario.propagation,
                                  substream_seed(scenario.seed, drop, kPropagation));
  w.pilots = assign_pilots(scenario.K, scenario.tau_p,
                           substream_seed(scenario.seed, drop, kPilots));
  w.est = compute_estimation_stats(w.stats, w.pilots, scenario.tau_p,
                                   scenario.rho_p_watts, scenario.noise_watts());
  return w;
}

SystemParams make_system_params(const Scenario& scenario) {
  SystemParams sys;
  sys.tau_p = scenario.tau_p;
  sys.tau_c = scenario.tau_c;
  sys.rho_p = scenario.rho_p_watts;
  sys.noise_power = scenario.noise_watts();
  sys.mu = scenario.mu;
  sys.rsi_linear = scenario.rsi_linear();
  sys.e_max_joules = scenario.e_max_joules;
  sys.p_max_watts = scenario.p_max_watts;
  sys.rate_thresholds =
      Eigen::VectorXd::Constant(scenario.K, scenario.rate_threshold_bps_hz);
  return sys;
}

DropResult summarize(const OptimizerOutcome& outcome, int drop_index) {
  DropResult d;
  d.drop_index = drop_index;
  d.feasible = outcome.feasible;
  d.converged = outcome.converged;
  d.anomaly = outcome.solver_anomaly;
  d.objective_j = outcome.objective();
  d.iterations = outcome.iterations;
  d.lp_recheck = outcome.lp_recheck_violation;
  d.trace = outcome.objective_trace;
  if (outcome.feasible) {
    d.mean_se = mean_of(outcome.per_user_se);
    d.mean_battery_fraction = mean_of(outcome.battery_fraction);
  }
  return d;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

CampaignResult run_campaign(const Scenario& scenario, int workers) {
  scenario.validate();
  const SystemParams sys = make_system_params(scenario);
  std::vector<int> tau_d_grid;
  if (scenario.baseline) tau_d_grid = scenario.baseline->tau_d_grid;

  CampaignResult result;
  result.algorithms.emplace_back("proposed", std::vector<DropResult>(scenario.drops));
  for (int tau_d : tau_d_grid)
    result.algorithms.emplace_back("ts_taud_" + std::to_string(tau_d),
                                   std::vector<DropResult>(scenario.drops));

  parallel_for(scenario.drops, workers, [&](int i) {
    const DropWorkspace w = prepare_drop(scenario, i);
    result.algorithms[0].second[std::size_t(i)] =
        summarize(optimize(w.stats, w.est, w.pilots, sys), i);
    for (std::size_t a = 0; a < tau_d_grid.size(); ++a) {
      result.algorithms[a + 1].second[std::size_t(i)] = summarize(
          optimize_ts_baseline(w.stats, w.est, w.pilots, sys, tau_d_grid[a]), i);
    }
  });
  return result;
}

ConvergenceResult experiment_convergence(const Scenario& scenario,
                                         const std::vector<double>& mu_list,
                                         int workers) {
  scenario.validate();
  ConvergenceResult r;
  r.mu_list = mu_list;
  r.per_mu.assign(mu_list.size(), std::vector<DropResult>(scenario.drops));

  parallel_for(scenario.drops, workers, [&](int i) {
    const DropWorkspace w = prepare_drop(scenario, i);
    for (std::size_t mi = 0; mi < mu_list.size(); ++mi) {
      SystemParams sys = make_system_params(scenario);
      sys.mu = mu_list[mi];
      r.per_mu[mi][std::size_t(i)] =
          summarize(optimize(w.stats, w.est, w.pilots, sys), i);
    }
  });

  // Mean objective per iteration over feasible drops; traces are padded with
  // their converged value.
  r.mean_trace.resize(mu_list.size());
  for (std::size_t mi = 0; mi < mu_list.size(); ++mi) {
    std::size_t longest = 0;
    for (const auto& d : r.per_mu[mi])
      if (d.feasible) longest = std::max(longest, d.trace.size());
    r.mean_trace[mi].assign(longest, 0.0);
    for (std::size_t it = 0; it < longest; ++it) {
      Welford wf;
      for (const auto& d : r.per_mu[mi]) {
        if (!d.feasible || d.trace.empty()) continue;
        wf.add(it < d.trace.size() ? d.trace[it] : d.trace.back());
      }
      r.mean_trace[mi][it] = wf.mean;
    }
  }
  return r;
}

RsiSweepResult experiment_rsi_sweep(const Scenario& scenario,
                                    const std::vector<double>& rsi_grid_db,
                                    int workers) {
  scenario.validate();
  RsiSweepResult r;
  r.rsi_db = rsi_grid_db;
  r.ts_tau_d = scenario.baseline ? scenario.baseline->rsi_sweep_tau_d : 100;
  r.proposed.assign(rsi_grid_db.size(), std::vector<DropResult>(scenario.drops));
  r.ts.resize(scenario.drops);

  parallel_for(scenario.drops, workers, [&](int i) {
    const DropWorkspace w = prepare_drop(scenario, i);
    for (std::size_t ri = 0; ri < rsi_grid_db.size(); ++ri) {
      SystemParams sys = make_system_params(scenario);
      sys.rsi_linear = db_to_linear(rsi_grid_db[ri]);
      r.proposed[ri][std::size_t(i)] =
          summarize(optimize(w.stats, w.est, w.pilots, sys), i);
    }
    const SystemParams sys = make_system_params(scenario);
    r.ts[std::size_t(i)] = summarize(
        optimize_ts_baseline(w.stats, w.est, w.pilots, sys, r.ts_tau_d), i);
  });
  return r;
}

OutageResult experiment_outage(const Scenario& scenario,
                               const std::vector<double>& rate_grid,
                               const std::vector<int>& ts_tau_d_grid,
                               int workers) {
  scenario.validate();
  OutageResult r;
  r.rate_grid = rate_grid;
  r.algorithms.push_back("proposed");
  for (int tau_d : ts_tau_d_grid)
    r.algorithms.push_back("ts_taud_" + std::to_string(tau_d));
  r.results.assign(
      r.algorithms.size(),
      std::vector<std::vector<DropResult>>(
          rate_grid.size(), std::vector<DropResult>(scenario.drops)));

  parallel_for(scenario.drops, workers, [&](int i) {
    const DropWorkspace w = prepare_drop(scenario, i);
    for (std::size_t gi = 0; gi < rate_grid.size(); ++gi) {
      SystemParams sys = make_system_params(scenario);
      sys.rate_thresholds = Eigen::VectorXd::Constant(scenario.K, rate_grid[gi]);
      r.results[0][gi][std::size_t(i)] =
          summarize(optimize(w.stats, w.est, w.pilots, sys), i);
      for (std::size_t a = 0; a < ts_tau_d_grid.size(); ++a) {
        r.results[a + 1][gi][std::size_t(i)] = summarize(
            optimize_ts_baseline(w.stats, w.est, w.pilots, sys, ts_tau_d_grid[a]),
            i);
      }
    }
  });
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void long_row(std::ofstream& out, const std::string& sweep,
              const std::string& algorithm, const std::string& metric,
              double value, double stderr_) {
  out << sweep << ',' << algorithm << ',' << metric << ','
      << format_double(value) << ',' << format_double(stderr_) << '\n';
}

void summary_rows(std::ofstream& out, const std::string& sweep,
                  const std::string& algorithm, const Aggregates& a) {
  long_row(out, sweep, algorithm, "outage_rate", a.outage_rate, a.outage_stderr);
  long_row(out, sweep, algorithm, "mean_objective_j", a.mean_objective_j,
           a.stderr_objective_j);
  long_row(out, sweep, algorithm, "battery_fraction", a.mean_battery_fraction,
           a.stderr_battery_fraction);
  long_row(out, sweep, algorithm, "se_bps_hz", a.mean_se, a.stderr_se);
}

}  // namespace

void write_drops_csv(const std::string& path, const CampaignResult& result) {
  auto out = open_out(path);
  out << "drop,algorithm,feasible,converged,objective_j,mean_se,"
         "mean_battery_fraction,iterations\n";
  for (const auto& [name, drops] : result.algorithms) {
    for (const auto& d : drops) {
      out << d.drop_index << ',' << name << ',' << (d.feasible ? 1 : 0) << ','
          << (d.converged ? 1 : 0) << ',' << format_double(d.objective_j) << ','
          << format_double(d.mean_se) << ','
          << format_double(d.mean_battery_fraction) << ',' << d.iterations
          << '\n';
    }
  }
}

void write_summary_csv(const std::string& path, const CampaignResult& result) {
  auto out = open_out(path);
  out << "sweep_var,algorithm,metric,value,stderr\n";
  for (const auto& [name, drops] : result.algorithms)
    summary_rows(out, "", name, aggregate(drops));
}

void write_convergence_csv(const std::string& path,
                           const ConvergenceResult& r) {
  auto out = open_out(path);
  out << "sweep_var,algorithm,metric,value,stderr\n";
  for (std::size_t mi = 0; mi < r.mu_list.size(); ++mi) {
    const std::string alg = "proposed_mu_" + format_double(r.mu_list[mi]);
    for (std::size_t it = 0; it < r.mean_trace[mi].size(); ++it)
      long_row(out, std::to_string(it), alg, "objective_j",
               r.mean_trace[mi][it], 0.0);
    Welford iters;
    for (const auto& d : r.per_mu[mi])
      if (d.feasible) iters.add(d.iterations);
    long_row(out, "", alg, "iterations", iters.mean, iters.stderr_());
  }
}

void write_rsi_csvs(const std::string& dir, const RsiSweepResult& r) {
  const std::string ts_name = "ts_taud_" + std::to_string(r.ts_tau_d);
  const Aggregates ts_agg = aggregate(r.ts);
  {
    auto out = open_out(dir + "/battery_fraction_vs_rsi.csv");
    out << "sweep_var,algorithm,metric,value,stderr\n";
    for (std::size_t ri = 0; ri < r.rsi_db.size(); ++ri) {
      const Aggregates a = aggregate(r.proposed[ri]);
      long_row(out, format_double(r.rsi_db[ri]), "proposed", "battery_fraction",
               a.mean_battery_fraction, a.stderr_battery_fraction);
      long_row(out, format_double(r.rsi_db[ri]), ts_name, "battery_fraction",
               ts_agg.mean_battery_fraction, ts_agg.stderr_battery_fraction);
    }
  }
  {
    auto out = open_out(dir + "/se_vs_rsi.csv");
    out << "sweep_var,algorithm,metric,value,stderr\n";
    for (std::size_t ri = 0; ri < r.rsi_db.size(); ++ri) {
      const Aggregates a = aggregate(r.proposed[ri]);
      long_row(out, format_double(r.rsi_db[ri]), "proposed", "se_bps_hz",
               a.mean_se, a.stderr_se);
      long_row(out, format_double(r.rsi_db[ri]), ts_name, "se_bps_hz",
               ts_agg.mean_se, ts_agg.stderr_se);
    }
  }
}

void write_outage_csv(const std::string& path, const OutageResult& r) {
  auto out = open_out(path);
  out << "sweep_var,algorithm,metric,value,stderr\n";
  for (std::size_t a = 0; a < r.algorithms.size(); ++a) {
    for (std::size_t gi = 0; gi < r.rate_grid.size(); ++gi) {
      const Aggregates agg = aggregate(r.results[a][gi]);
      long_row(out, format_double(r.rate_grid[gi]), r.algorithms[a],
               "outage_rate", agg.outage_rate, agg.outage_stderr);
    }
  }
}

namespace {

std::string git_revision() {
  namespace fs = std::filesystem;
  fs::path dir = fs::current_path();
  for (int depth = 0; depth < 6; ++depth) {
    const fs::path head = dir / ".git" / "HEAD";
    if (fs::exists(head)) {
      std::ifstream in(head);
      std::string line;
      std::getline(in, line);
      if (line.rfind("ref: ", 0) == 0) {
        std::ifstream ref(dir / ".git" / line.substr(5));
        std::string rev;
        if (ref && std::getline(ref, rev)) return rev;
        return "unknown";
      }
      return line;
    }
    if (!dir.has_parent_path() || dir.parent_path() == dir) break;
    dir = dir.parent_path();
  }
  return "unknown";
}

}  // namespace

void write_manifest(const std::string& dir, const Scenario& scenario,
                    const std::string& command, int workers) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(scenario.config_hash()));
  j["config_hash"] = hash;
  j["seed"] = scenario.seed;
  j["drops"] = scenario.drops;
  j["command"] = command;
  j["workers"] = workers;
  j["git_revision"] = git_revision();
  j["scenario"] = nlohmann::json::parse(scenario.to_json_string(-1));
  auto out = open_out(dir + "/manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace cfser
