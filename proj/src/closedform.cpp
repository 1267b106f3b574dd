#include "cfser/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace cfser {

double HarvestCoefficients::evaluate(int k, const Eigen::MatrixXd& p_dl,
                                     const Eigen::VectorXd& eta) const {
  const auto& ap = from_ap[static_cast<std::size_t>(k)];
  const auto& cont = contamination[static_cast<std::size_t>(k)];
  return (ap.array() * p_dl.array()).sum() +
         (cont.array() * p_dl.array()).sum() + from_users.row(k).dot(eta);
}

HarvestCoefficients harvest_coefficients(const EstimationStats& est,
                                         const ChannelStats& stats,
                                         const PilotAssignment& pilots,
                                         double mu, double tau_harvest) {
  if (mu < 0.0 || mu > 1.0)
    throw std::invalid_argument("harvest_coefficients: mu must be in [0,1]");
  if (tau_harvest < 0.0)
    throw std::invalid_argument("harvest_coefficients: tau_harvest must be >= 0");

  const int M = stats.num_aps();
  const int K = stats.num_users();
  const double trp = double(est.tau_p) * est.rho_p;
  const double scale = mu * tau_harvest;

  HarvestCoefficients hc;
  hc.mu = mu;
  hc.tau_harvest = tau_harvest;
  hc.from_ap.assign(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(M, K));
  hc.contamination.assign(static_cast<std::size_t>(K),
                          Eigen::MatrixXd::Zero(M, K));
  hc.from_users.resize(K, K);

  for (int k = 0; k < K; ++k) {
    auto& ap = hc.from_ap[static_cast<std::size_t>(k)];
    auto& cont = hc.contamination[static_cast<std::size_t>(k)];
    for (int m = 0; m < M; ++m) {
      const LinkStats& lk = stats.ap_user(m, k);
      const double los2 = lk.los_amplitude * lk.los_amplitude;
      const double self_corr = trp * trp * (2.0 * lk.beta * los2 + lk.beta * lk.beta);
      for (int j = 0; j < K; ++j) {
        ap(m, j) = scale * est.gamma(m, j) * lk.w;
        if (pilots.share_pilot(k, j)) {
          const double r = est.w(m, j) / est.psi(m, j);
          cont(m, j) = scale * self_corr * r * r;
        }
      }
    }
    for (int j = 0; j < K; ++j)
      hc.from_users(k, j) = scale * stats.user_user(k, j).w;
  }
  return hc;
}

StatsMatrices stats_matrices(const EstimationStats& est,
                             const ChannelStats& stats,
                             const PilotAssignment& pilots,
                             const Eigen::VectorXd& rsi,
                             const StatsMatrixOptions& options) {
  const int M = stats.num_aps();
  const int K = stats.num_users();
  if (rsi.size() != M)
    throw std::invalid_argument("stats_matrices: rsi must have one entry per AP");
  for (int m = 0; m < M; ++m)
    if (rsi[m] < 0.0 || rsi[m] >= 1.0)
      throw std::invalid_argument("stats_matrices: rsi levels must lie in [0,1)");

  const double trp = double(est.tau_p) * est.rho_p;
  const double chi =
      options.pilot_energy_coef > 0.0 ? options.pilot_energy_coef : trp;

  StatsMatrices sm;
  sm.M = M;
  sm.K = K;
  sm.b.resize(M, K);
  sm.d.resize(M, K);
  sm.c.assign(std::size_t(K) * K, Eigen::MatrixXd::Zero(M, M));
  sm.f_diag.assign(std::size_t(K), Eigen::MatrixXd::Zero(M, M * K));

  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double w = est.w(m, k);
      sm.b(m, k) = cplx(chi * w * w / est.psi(m, k), 0.0);
      sm.d(m, k) = est.noise_power * est.gamma(m, k);
    }
  }

  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      Eigen::MatrixXd& C = sm.c_mat(k, j);
      const bool copilot = pilots.share_pilot(k, j);
      for (int m = 0; m < M; ++m) {
        const LinkStats& lj = stats.ap_user(m, j);
        const double rk = est.w(m, k) / est.psi(m, k);
        double diag = est.gamma(m, k) * lj.w;
        if (copilot) {
          const double los2 = lj.los_amplitude * lj.los_amplitude;
          diag += chi * chi * (2.0 * lj.beta * los2 + lj.beta * lj.beta) * rk * rk;
          for (int mp = m + 1; mp < M; ++mp) {
            const double rkp = est.w(mp, k) / est.psi(mp, k);
            const double off =
                chi * chi * rk * rkp * lj.w * stats.ap_user(mp, j).w;
            C(m, mp) = off;
            C(mp, m) = off;
          }
        }
        C(m, m) = diag;
      }
    }
  }

  // Fourth-moment correction of the shared-pilot observation, per (m, group):
  // E|yc|^4 = 2 psi^2 - (tau_p rho_p)^2 * sum_{i in group} |los_i|^4.
  Eigen::MatrixXd los4_sum = Eigen::MatrixXd::Zero(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      for (int i : pilots.copilot[k]) {
        const double l2 = stats.ap_user(m, i).los_amplitude *
                          stats.ap_user(m, i).los_amplitude;
        s += l2 * l2;
      }
      los4_sum(m, k) = s;
    }
  }

  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXd& F = sm.f_diag[static_cast<std::size_t>(k)];
    for (int m = 0; m < M; ++m) {
      const double gk = est.gamma(m, k);
      for (int q = 0; q < M; ++q) {
        const double lead = rsi[m] * stats.ap_ap(m, q).w;
        for (int j = 0; j < K; ++j) {
          double val;
          if (q != m) {
            val = lead * gk * est.gamma(q, j);
          } else if (options.f_same_ap_aggregate_variant) {
            val = lead * gk * est.gamma(m, j);
            if (pilots.share_pilot(k, j)) {
              const LinkStats& lj = stats.ap_user(m, j);
              const double los2 = lj.los_amplitude * lj.los_amplitude;
              const double rk = est.w(m, k) / est.psi(m, k);
              val += lead *
                     (chi * chi * (2.0 * lj.beta * los2 + lj.beta * lj.beta) *
                          rk * rk +
                      gk * est.c_err(m, j));
            }
          } else {
            // Exact same-AP branch: both estimates are scalings of the same
            // pilot observation when j shares k's pilot.
            double factor = 1.0;
            if (pilots.share_pilot(k, j)) {
              const double psi = est.psi(m, k);
              factor = 2.0 - trp * trp * los4_sum(m, k) / (psi * psi);
            }
            val = lead * gk * est.gamma(m, j) * factor;
          }
          F(m, q * K + j) = val;
        }
      }
    }
  }
  return sm;
}

SinrTerms sinr_terms(const StatsMatrices& sm, const Eigen::VectorXcd& alpha_k,
                     const Eigen::MatrixXd& p_dl, int k) {
  if (alpha_k.size() != sm.M)
    throw std::invalid_argument("sinr_terms: filter length must equal AP count");
  if (alpha_k.norm() == 0.0)
    throw std::invalid_argument("sinr_terms: filter must be nonzero");

  const Eigen::VectorXd re = alpha_k.real();
  const Eigen::VectorXd im = alpha_k.imag();
  const Eigen::VectorXd a2 = alpha_k.cwiseAbs2();

  SinrTerms t;
  const cplx sig = alpha_k.adjoint() * sm.b.col(k);
  t.signal_gain = std::norm(sig);
  t.data_power.resize(sm.K);
  for (int j = 0; j < sm.K; ++j) {
    const Eigen::MatrixXd& C = sm.c_mat(k, j);
    t.data_power[j] = re.dot(C * re) + im.dot(C * im);
  }
  t.noise_power = a2.dot(sm.d.col(k));

  const Eigen::VectorXd fq = sm.f_diag[static_cast<std::size_t>(k)].transpose() * a2;
  double rsi = 0.0;
  for (int q = 0; q < sm.M; ++q)
    for (int j = 0; j < sm.K; ++j) rsi += fq[q * sm.K + j] * p_dl(q, j);
  t.rsi_power = rsi;
  return t;
}

double effective_sinr(const StatsMatrices& sm, const Allocation& alloc, int k) {
  const SinrTerms t = sinr_terms(sm, alloc.alpha[static_cast<std::size_t>(k)],
                                 alloc.p_dl, k);
  const Eigen::VectorXd eta = alloc.eta();
  const double num = eta[k] * t.signal_gain;
  const double den =
      eta.dot(t.data_power) - num + t.rsi_power + t.noise_power;
  if (num == 0.0) return 0.0;
  if (!(den > 0.0))
    throw std::domain_error("effective_sinr: non-positive denominator");
  return num / den;
}

double spectral_efficiency(double sinr, double tau_u, double tau_c) {
  if (sinr < 0.0)
    throw std::invalid_argument("spectral_efficiency: sinr must be >= 0");
  if (!(tau_u > 0.0) || !(tau_c > 0.0))
    throw std::invalid_argument("spectral_efficiency: invalid frame lengths");
  return tau_u / tau_c * std::log2(1.0 + sinr);
}

double sinr_threshold(double rate_req, double tau_u, double tau_c) {
  if (rate_req < 0.0)
    throw std::invalid_argument("sinr_threshold: rate must be >= 0");
  if (!(tau_u > 0.0) || !(tau_c > 0.0))
    throw std::invalid_argument("sinr_threshold: invalid frame lengths");
  return std::exp2(tau_c * rate_req / tau_u) - 1.0;
}

}  // namespace cfser
