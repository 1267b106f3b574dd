#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cfser/common.hpp"
#include "cfser/geometry.hpp"

namespace cfser {

/// Large-scale model constants (3GPP InH-Office defaults). Path loss in dB is
/// const + dist_coef * log10(d_3D [m]) + freq_coef * log10(f_c [GHz]); the
/// NLOS loss is lower-bounded by the LOS loss at the same distance.
struct PropagationConfig {
  double carrier_freq_ghz = 3.4;
  double bandwidth_hz = 20e6;

  double pl_los_const_db = 32.4;
  double pl_los_dist_coef = 17.3;
  double pl_los_freq_coef = 20.0;
  double pl_nlos_const_db = 17.30;
  double pl_nlos_dist_coef = 38.3;
  double pl_nlos_freq_coef = 24.9;

  // P(LOS) = 1 for d_2D <= los_near_m, exp(-(d-near)/decay_near) up to
  // los_far_m, then far_weight * exp(-(d-far)/decay_far).
  double los_near_m = 5.0;
  double los_far_m = 49.0;
  double los_decay_near_m = 70.8;
  double los_decay_far_m = 211.7;
  double los_far_weight = 0.54;

  double shadow_sigma_los_db = 3.0;
  double shadow_sigma_nlos_db = 8.03;

  // Rician factor kappa[dB] = k0 - slope * d_3D; applies to LOS links only.
  double rician_k0_db = 13.0;
  double rician_k_slope_db_per_m = 0.03;

  // Near-field self-coupling (user to itself, AP to itself): total mean-square
  // gain in dB, modeled as NLOS-only scattering.
  double user_selfloop_gain_db = -15.0;
  double ap_selfloop_gain_db = -15.0;

  // Path-loss formulas are evaluated at no less than this distance.
  double min_pathloss_distance_m = 1.0;
};

/// Second-order description of one link. Phases of the LOS component are
/// unknown and uniform, so only the LOS magnitude is kept; the mean-square
/// gain satisfies w = los_amplitude^2 + beta.
struct LinkStats {
  double beta = 0.0;           // NLOS variance
  double los_amplitude = 0.0;  // LOS magnitude
  double w = 0.0;              // mean-square channel gain
  bool is_los = false;
};

struct ChannelStats {
  Grid<LinkStats> ap_user;    // M x K
  Grid<LinkStats> user_user;  // K x K, symmetric; diagonal = user self-loop
  Grid<LinkStats> ap_ap;      // M x M, symmetric; diagonal = AP self-loop

  int num_aps() const { return ap_user.rows(); }
  int num_users() const { return ap_user.cols(); }
};

/// One small-scale draw of every channel. Gains follow
/// los_amplitude * e^{j*theta} + CN(0, beta); the theta draws are kept for
/// decomposition tests. user_user and ap_ap are reciprocal (symmetric).
struct ChannelRealization {
  Eigen::MatrixXcd ap_user;
  Eigen::MatrixXcd user_user;
  Eigen::MatrixXcd ap_ap;
  Eigen::MatrixXd ap_user_phase;
  Eigen::MatrixXd user_user_phase;
  Eigen::MatrixXd ap_ap_phase;
};

double los_probability(const PropagationConfig& cfg, double d2d_m);
double pathloss_db(const PropagationConfig& cfg, double d3d_m, bool los);

/// Draws LOS state, shadowing and the Rician split for a single link.
LinkStats draw_link_stats(const PropagationConfig& cfg, double d2d_m,
                          double d3d_m, Rng& rng);

/// Large-scale statistics for every link of a deployment. Deterministic given
/// the seed; user-user and AP-AP grids are drawn once per unordered pair.
ChannelStats compute_channel_stats(const Deployment& dep,
                                   const PropagationConfig& cfg,
                                   std::uint64_t seed);

ChannelRealization sample_realization(const ChannelStats& stats,
                                      std::uint64_t seed);

/// Buffer-reusing variant for Monte-Carlo loops.
void sample_realization_into(const ChannelStats& stats, Rng& rng,
                             ChannelRealization& out);

}  // namespace cfser
