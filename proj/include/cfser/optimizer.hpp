#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfser/allocation.hpp"
#include "cfser/closedform.hpp"
#include "cfser/estimation.hpp"
#include "cfser/lpsolver.hpp"
#include "cfser/propagation.hpp"

namespace cfser {

struct OptimizerConfig {
  double eps_conv = 1e-5;   // relative objective change at convergence
  int max_iterations = 50;  // cap on alternating rounds
  double eps_mono = 1e-7;   // tolerated relative objective increase
  // After convergence, re-solve once maximizing the total harvested draw with
  // the battery draws frozen at their optimal values. The objective value is
  // untouched; the returned allocation spends all harvestable energy instead
  // of sitting at an arbitrary tie among optima.
  bool maximize_harvest_draw = true;
  LpOptions lp;
};

struct OptimizerOutcome {
  bool feasible = false;
  bool converged = false;
  // Set when a later iteration's LP unexpectedly fails or the objective trace
  // rises beyond eps_mono; the last consistent allocation is kept.
  bool solver_anomaly = false;
  Allocation allocation;
  std::vector<double> objective_trace;  // joules, one entry per round
  int iterations = 0;
  Eigen::VectorXd per_user_se;          // bits/s/Hz
  Eigen::VectorXd battery_fraction;     // battery share of each user's energy
  double lp_recheck_violation = 0.0;    // worst independent recheck over all solves

  double objective() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

/// Assembles the battery-minimization LP at fixed filters. The rate demands
/// enter as linearized SINR rows in the (1 + threshold) form; the harvest
/// rows keep the uplink-power-dependent harvested energy on the left side.
LinearProgram build_lp(const StatsMatrices& sm, const HarvestCoefficients& hc,
                       const EstimationStats& est,
                       const std::vector<Eigen::VectorXcd>& alpha,
                       const Eigen::VectorXd& gamma_th, double tau_u,
                       double e_max, double p_max);

/// Per-user generalized-Rayleigh-quotient maximizer at fixed powers:
/// alpha_k = Sigma_k^{-1} b_k, unit-normalized, with
/// Sigma_k = sum_j eta_j C_{k,j} + sum_{q,j} p(q,j) F_{k,q,j} + D_k.
/// Throws std::domain_error when the system is degenerate (zero gain vector
/// or numerically singular Sigma).
std::vector<Eigen::VectorXcd> update_filters(const StatsMatrices& sm,
                                             const Allocation& alloc);

/// Alternating loop over LP solves and filter updates from the all-ones
/// filter start. First-round infeasibility is an outage (feasible = false).
OptimizerOutcome optimize_with_stats(const StatsMatrices& sm,
                                     const HarvestCoefficients& hc,
                                     const EstimationStats& est,
                                     const Eigen::VectorXd& gamma_th,
                                     double tau_u, double tau_c, double e_max,
                                     double p_max,
                                     const OptimizerConfig& cfg = {});

/// Physical and protocol parameters shared by the drop-level entry points.
struct SystemParams {
  int tau_p = 2;
  int tau_c = 200;
  double rho_p = 0.1;          // W
  double noise_power = 0.0;    // W
  double mu = 0.5;
  double rsi_linear = 0.0;     // residual SI level in [0,1)
  double e_max_joules = 0.2;   // per user
  double p_max_watts = 1.0;    // per AP
  Eigen::VectorXd rate_thresholds;  // per user, bits/s/Hz
};

/// Proposed protocol: uplink data and harvesting share the whole second phase
/// (tau_u = tau_c - tau_p), with self-energy recycling and the residual-SI
/// coupling active.
OptimizerOutcome optimize(const ChannelStats& stats, const EstimationStats& est,
                          const PilotAssignment& pilots,
                          const SystemParams& sys,
                          const OptimizerConfig& cfg = {});

/// Time-switching baseline: tau_d samples are dedicated to downlink energy
/// transfer (tau_u = tau_c - tau_p - tau_d). Users do not transmit while
/// harvesting (no user-to-user or self-recycling energy) and the APs are
/// silent during the uplink (no residual-SI term in the SINR).
OptimizerOutcome optimize_ts_baseline(const ChannelStats& stats,
                                      const EstimationStats& est,
                                      const PilotAssignment& pilots,
                                      const SystemParams& sys, int tau_d,
                                      const OptimizerConfig& cfg = {});

}  // namespace cfser
