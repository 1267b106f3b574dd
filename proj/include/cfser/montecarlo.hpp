#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfser/allocation.hpp"
#include "cfser/closedform.hpp"
#include "cfser/estimation.hpp"
#include "cfser/propagation.hpp"

namespace cfser {

/// Sample-average estimate with per-component standard errors. Real-valued
/// quantities carry a (statistically zero) imaginary part.
struct McEstimate {
  cplx mean{0.0, 0.0};
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  long long n_samples = 0;
};

/// Largest per-component standardized deviation from the reference; exact
/// zero-variance components score 0 when they match and infinity otherwise.
double z_score(const McEstimate& est, cplx reference);

/// Identifies one defining expectation of the second-order statistics.
struct ElementId {
  enum class Kind { B, C, D, F } kind = Kind::B;
  int k = 0, j = 0, q = 0, m = 0, mp = 0;

  static ElementId b(int m, int k) { return {Kind::B, k, 0, 0, m, m}; }
  static ElementId c(int k, int j, int m, int mp) { return {Kind::C, k, j, 0, m, mp}; }
  static ElementId d(int m, int k) { return {Kind::D, k, 0, 0, m, m}; }
  static ElementId f(int k, int q, int j, int m, int mp) { return {Kind::F, k, j, q, m, mp}; }
};

/// Simulates the second phase signal-level model: per sample draws a channel
/// realization, pilot-noise-perturbed estimates, unit-modulus energy symbols
/// and unit-variance data symbols, and averages the harvested energy per user.
std::vector<McEstimate> mc_harvested_energy(
    const ChannelStats& stats, const EstimationStats& est,
    const PilotAssignment& pilots, const Allocation& alloc, double mu,
    double tau_harvest, long long n_samples, std::uint64_t seed);

/// Sample average of the defining product of one statistics element.
McEstimate mc_stats_element(const ChannelStats& stats,
                            const EstimationStats& est,
                            const PilotAssignment& pilots,
                            const Eigen::VectorXd& rsi, const ElementId& which,
                            long long n_samples, std::uint64_t seed);

/// Per-user estimates of the variance decomposition behind the effective
/// SINR: the combined desired gain, per-source data powers, residual-SI power
/// and noise power after CPU combining.
struct McSinrTerms {
  McEstimate combined_gain;             // E[alpha^H (ghat* . g_k)]
  std::vector<McEstimate> data_power;   // per source user j
  McEstimate rsi_power;
  McEstimate noise_power;
};

std::vector<McSinrTerms> mc_sinr_terms(const ChannelStats& stats,
                                       const EstimationStats& est,
                                       const PilotAssignment& pilots,
                                       const Allocation& alloc,
                                       const Eigen::VectorXd& rsi,
                                       long long n_samples, std::uint64_t seed);

/// One-pass estimates of every independent element of B, C, D, F plus the
/// per-user harvested energy; C and F are accumulated on the upper triangle
/// (the (m', m) sample is the exact conjugate of the (m, m') sample).
struct McStatsBatch {
  int M = 0, K = 0;
  std::vector<McEstimate> b;  // index m*K + k
  std::vector<McEstimate> c;  // index ((k*K + j)*M + m)*M + mp, m <= mp
  std::vector<McEstimate> d;  // index m*K + k
  std::vector<McEstimate> f;  // index (((k*M + q)*K + j)*M + m)*M + mp, m <= mp
  std::vector<McEstimate> harvested;  // per user

  const McEstimate& b_at(int m, int k) const { return b[std::size_t(m) * K + k]; }
  const McEstimate& c_at(int k, int j, int m, int mp) const;
  const McEstimate& d_at(int m, int k) const { return d[std::size_t(m) * K + k]; }
  const McEstimate& f_at(int k, int q, int j, int m, int mp) const;
};

McStatsBatch mc_all_stats_elements(const ChannelStats& stats,
                                   const EstimationStats& est,
                                   const PilotAssignment& pilots,
                                   const Eigen::VectorXd& rsi,
                                   const Allocation& alloc, double mu,
                                   double tau_harvest, long long n_samples,
                                   std::uint64_t seed);

}  // namespace cfser
