#include "cfser/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfser {

PilotAssignment PilotAssignment::from_indices(std::vector<int> indices,
                                              int tau_p) {
  if (tau_p < 1)
    throw std::invalid_argument("PilotAssignment: tau_p must be >= 1");
  for (int idx : indices)
    if (idx < 0 || idx >= tau_p)
      throw std::invalid_argument("PilotAssignment: pilot index out of range");

  PilotAssignment pa;
  pa.tau_p = tau_p;
  pa.pilot_index = std::move(indices);
  const int K = pa.num_users();
  pa.copilot.resize(K);
  std::vector<std::vector<int>> by_pilot(tau_p);
  for (int k = 0; k < K; ++k) by_pilot[pa.pilot_index[k]].push_back(k);
  for (int k = 0; k < K; ++k) pa.copilot[k] = by_pilot[pa.pilot_index[k]];
  for (auto& g : by_pilot)
    if (!g.empty()) pa.groups.push_back(std::move(g));
  return pa;
}

PilotAssignment assign_pilots(int num_users, int tau_p, std::uint64_t seed) {
  if (num_users < 1)
    throw std::invalid_argument("assign_pilots: num_users must be >= 1");
  if (tau_p < 1) throw std::invalid_argument("assign_pilots: tau_p must be >= 1");
  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(num_users));
  for (auto& i : idx) i = static_cast<int>(rng.next_u64() % std::uint64_t(tau_p));
  return PilotAssignment::from_indices(std::move(idx), tau_p);
}

EstimationStats compute_estimation_stats(const ChannelStats& stats,
                                         const PilotAssignment& pilots,
                                         int tau_p, double rho_p,
                                         double noise_power) {
  if (tau_p < 1 || !(rho_p > 0.0) || noise_power < 0.0)
    throw std::invalid_argument(
        "compute_estimation_stats: tau_p and rho_p must be positive, "
        "noise_power non-negative");
  const int M = stats.num_aps();
  const int K = stats.num_users();
  const double trp = double(tau_p) * rho_p;

  EstimationStats est;
  est.tau_p = tau_p;
  est.rho_p = rho_p;
  est.noise_power = noise_power;
  est.psi.resize(M, K);
  est.gamma.resize(M, K);
  est.c_err.resize(M, K);

  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      double psi = noise_power;
      for (int j : pilots.copilot[k]) psi += trp * stats.ap_user(m, j).w;
      const double w = stats.ap_user(m, k).w;
      const double gamma = trp * w * w / psi;
      est.psi(m, k) = psi;
      est.gamma(m, k) = gamma;
      est.c_err(m, k) = w - gamma;
    }
  }
  return est;
}

void estimate_channels_into(const ChannelRealization& realization,
                            const PilotAssignment& pilots,
                            const EstimationStats& est, Rng& rng,
                            EstimationWorkspace& ws, Eigen::MatrixXcd& ghat) {
  const int M = static_cast<int>(realization.ap_user.rows());
  const int K = static_cast<int>(realization.ap_user.cols());
  const int G = static_cast<int>(pilots.groups.size());
  const double amp = std::sqrt(double(est.tau_p) * est.rho_p);

  if (ws.ycheck.rows() != M || ws.ycheck.cols() != G) ws.ycheck.resize(M, G);
  if (ghat.rows() != M || ghat.cols() != K) ghat.resize(M, K);

  for (int g = 0; g < G; ++g) {
    for (int m = 0; m < M; ++m) {
      cplx acc = rng.complex_gaussian(est.noise_power);
      for (int j : pilots.groups[g]) acc += amp * realization.ap_user(m, j);
      ws.ycheck(m, g) = acc;
    }
  }
  // Group index per user (groups are small; linear scan is fine).
  for (int g = 0; g < G; ++g) {
    for (int k : pilots.groups[g]) {
      for (int m = 0; m < M; ++m) {
        const double w = est.w(m, k);
        ghat(m, k) = amp * w / est.psi(m, k) * ws.ycheck(m, g);
      }
    }
  }
}

Eigen::MatrixXcd estimate_channels(const ChannelRealization& realization,
                                   const PilotAssignment& pilots,
                                   const EstimationStats& est,
                                   std::uint64_t noise_seed) {
  Rng rng(noise_seed);
  EstimationWorkspace ws;
  Eigen::MatrixXcd ghat;
  estimate_channels_into(realization, pilots, est, rng, ws, ghat);
  return ghat;
}

}  // namespace cfser
