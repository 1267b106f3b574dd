#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfser/common.hpp"
#include "cfser/propagation.hpp"

namespace cfser {

/// Which pilot each user transmits and, per user, the set of users sharing
/// that pilot (itself included). Pilot sequences are never materialized: all
/// statistics depend only on this orthogonality structure.
struct PilotAssignment {
  int tau_p = 0;
  std::vector<int> pilot_index;             // per user, in [0, tau_p)
  std::vector<std::vector<int>> copilot;    // per user: sorted co-pilot set
  std::vector<std::vector<int>> groups;     // non-empty pilot groups, by pilot

  int num_users() const { return static_cast<int>(pilot_index.size()); }
  bool share_pilot(int k, int j) const {
    return pilot_index[k] == pilot_index[j];
  }

  /// Builds the co-pilot structure from explicit indices (also the test hook
  /// for forcing orthogonal or fully shared assignments).
  static PilotAssignment from_indices(std::vector<int> indices, int tau_p);
};

/// Uniform i.i.d. pilot selection.
PilotAssignment assign_pilots(int num_users, int tau_p, std::uint64_t seed);

/// Per-link estimator statistics: psi is the projected-observation power,
/// gamma the estimate variance, c_err the error variance (w = gamma + c_err).
struct EstimationStats {
  Eigen::MatrixXd psi;    // M x K
  Eigen::MatrixXd gamma;  // M x K
  Eigen::MatrixXd c_err;  // M x K
  int tau_p = 0;
  double rho_p = 0.0;
  double noise_power = 0.0;

  double w(int m, int k) const { return gamma(m, k) + c_err(m, k); }
};

EstimationStats compute_estimation_stats(const ChannelStats& stats,
                                         const PilotAssignment& pilots,
                                         int tau_p, double rho_p,
                                         double noise_power);

struct EstimationWorkspace {
  Eigen::MatrixXcd ycheck;  // M x #groups
};

/// Linear estimates of the AP-user channels from projected pilot observations.
/// The projected noise is drawn directly with variance noise_power, which is
/// distributionally identical to projecting a full pilot-length noise vector.
void estimate_channels_into(const ChannelRealization& realization,
                            const PilotAssignment& pilots,
                            const EstimationStats& est, Rng& rng,
                            EstimationWorkspace& ws, Eigen::MatrixXcd& ghat);

Eigen::MatrixXcd estimate_channels(const ChannelRealization& realization,
                                   const PilotAssignment& pilots,
                                   const EstimationStats& est,
                                   std::uint64_t noise_seed);

}  // namespace cfser
