#include "cfser/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace cfser {

double los_probability(const PropagationConfig& cfg, double d2d_m) {
  if (d2d_m <= cfg.los_near_m) return 1.0;
  if (d2d_m <= cfg.los_far_m)
    return std::exp(-(d2d_m - cfg.los_near_m) / cfg.los_decay_near_m);
  return cfg.los_far_weight *
         std::exp(-(d2d_m - cfg.los_far_m) / cfg.los_decay_far_m);
}

double pathloss_db(const PropagationConfig& cfg, double d3d_m, bool los) {
  const double d = std::max(d3d_m, cfg.min_pathloss_distance_m);
  const double lf = std::log10(cfg.carrier_freq_ghz);
  const double pl_los = cfg.pl_los_const_db +
                        cfg.pl_los_dist_coef * std::log10(d) +
                        cfg.pl_los_freq_coef * lf;
  if (los) return pl_los;
  const double pl_nlos = cfg.pl_nlos_const_db +
                         cfg.pl_nlos_dist_coef * std::log10(d) +
                         cfg.pl_nlos_freq_coef * lf;
  return std::max(pl_los, pl_nlos);
}

LinkStats draw_link_stats(const PropagationConfig& cfg, double d2d_m,
                          double d3d_m, Rng& rng) {
  if (!(d3d_m >= 0.0))
    throw std::runtime_error("draw_link_stats: negative distance");

  LinkStats out;
  out.is_los = rng.uniform() < los_probability(cfg, d2d_m);
  const double shadow_sigma =
      out.is_los ? cfg.shadow_sigma_los_db : cfg.shadow_sigma_nlos_db;
  const double pl = pathloss_db(cfg, d3d_m, out.is_los);
  const double omega = db_to_linear(-(pl + shadow_sigma * rng.gaussian()));

  if (out.is_los) {
    const double kappa = db_to_linear(cfg.rician_k0_db -
                                      cfg.rician_k_slope_db_per_m * d3d_m);
    out.beta = omega / (1.0 + kappa);
    out.los_amplitude = std::sqrt(omega * kappa / (1.0 + kappa));
  } else {
    out.beta = omega;
    out.los_amplitude = 0.0;
  }
  out.w = out.los_amplitude * out.los_amplitude + out.beta;
  return out;
}

namespace {

LinkStats selfloop_stats(double gain_db) {
  LinkStats out;
  out.beta = db_to_linear(gain_db);
  out.los_amplitude = 0.0;
  out.w = out.beta;
  out.is_los = false;
  return out;
}

}  // namespace

ChannelStats compute_channel_stats(const Deployment& dep,
                                   const PropagationConfig& cfg,
                                   std::uint64_t seed) {
  const int M = dep.num_aps();
  const int K = dep.num_users();
  ChannelStats stats;
  stats.ap_user = Grid<LinkStats>(M, K);
  stats.user_user = Grid<LinkStats>(K, K);
  stats.ap_ap = Grid<LinkStats>(M, M);

  Rng rng(seed);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double d2d = wrap_distance_2d(dep.ap_positions[m],
                                          dep.user_positions[k],
                                          dep.side_length);
      const double d3d = std::hypot(d2d, dep.height_diff);
      stats.ap_user(m, k) = draw_link_stats(cfg, d2d, d3d, rng);
    }
  }
  // Same-plane link classes: zero vertical offset, one draw per unordered pair.
  for (int k = 0; k < K; ++k) {
    stats.user_user(k, k) = selfloop_stats(cfg.user_selfloop_gain_db);
    for (int j = k + 1; j < K; ++j) {
      const double d = wrap_distance_2d(dep.user_positions[k],
                                        dep.user_positions[j],
                                        dep.side_length);
      const LinkStats s = draw_link_stats(cfg, d, d, rng);
      stats.user_user(k, j) = s;
      stats.user_user(j, k) = s;
    }
  }
  for (int m = 0; m < M; ++m) {
    stats.ap_ap(m, m) = selfloop_stats(cfg.ap_selfloop_gain_db);
    for (int q = m + 1; q < M; ++q) {
      const double d = wrap_distance_2d(dep.ap_positions[m],
                                        dep.ap_positions[q],
                                        dep.side_length);
      const LinkStats s = draw_link_stats(cfg, d, d, rng);
      stats.ap_ap(m, q) = s;
      stats.ap_ap(q, m) = s;
    }
  }
  return stats;
}

namespace {

void draw_gain(const LinkStats& s, Rng& rng, cplx& g, double& theta) {
  theta = rng.phase();
  g = s.los_amplitude * cplx(std::cos(theta), std::sin(theta)) +
      rng.complex_gaussian(s.beta);
}

}  // namespace

void sample_realization_into(const ChannelStats& stats, Rng& rng,
                             ChannelRealization& out) {
  const int M = stats.num_aps();
  const int K = stats.num_users();
  if (out.ap_user.rows() != M || out.ap_user.cols() != K) {
    out.ap_user.resize(M, K);
    out.user_user.resize(K, K);
    out.ap_ap.resize(M, M);
    out.ap_user_phase.resize(M, K);
    out.user_user_phase.resize(K, K);
    out.ap_ap_phase.resize(M, M);
  }
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k)
      draw_gain(stats.ap_user(m, k), rng, out.ap_user(m, k),
                out.ap_user_phase(m, k));
  for (int k = 0; k < K; ++k) {
    for (int j = k; j < K; ++j) {
      draw_gain(stats.user_user(k, j), rng, out.user_user(k, j),
                out.user_user_phase(k, j));
      out.user_user(j, k) = out.user_user(k, j);
      out.user_user_phase(j, k) = out.user_user_phase(k, j);
    }
  }
  for (int m = 0; m < M; ++m) {
    for (int q = m; q < M; ++q) {
      draw_gain(stats.ap_ap(m, q), rng, out.ap_ap(m, q),
                out.ap_ap_phase(m, q));
      out.ap_ap(q, m) = out.ap_ap(m, q);
      out.ap_ap_phase(q, m) = out.ap_ap_phase(m, q);
    }
  }
}

ChannelRealization sample_realization(const ChannelStats& stats,
                                      std::uint64_t seed) {
  ChannelRealization out;
  Rng rng(seed);
  sample_realization_into(stats, rng, out);
  return out;
}

}  // namespace cfser
