#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cfser {

/// Decision variables of the battery-minimization problem: downlink energy
/// powers per (AP, user), per-user uplink powers split into the harvested and
/// battery draws, and the per-user receive filters applied at the CPU.
struct Allocation {
  Eigen::MatrixXd p_dl;    // M x K, watts
  Eigen::VectorXd eta_e;   // K, watts drawn from harvested energy
  Eigen::VectorXd eta_b;   // K, watts drawn from the battery
  std::vector<Eigen::VectorXcd> alpha;  // K filters of length M

  Eigen::VectorXd eta() const { return eta_e + eta_b; }

  static Allocation zeros(int num_aps, int num_users);
};

inline Allocation Allocation::zeros(int num_aps, int num_users) {
  Allocation a;
  a.p_dl = Eigen::MatrixXd::Zero(num_aps, num_users);
  a.eta_e = Eigen::VectorXd::Zero(num_users);
  a.eta_b = Eigen::VectorXd::Zero(num_users);
  a.alpha.assign(static_cast<std::size_t>(num_users),
                 Eigen::VectorXcd::Ones(num_aps));
  return a;
}

}  // namespace cfser
