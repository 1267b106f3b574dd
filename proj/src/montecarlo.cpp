#include "cfser/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfser {

namespace {

struct Acc {
  double sr = 0.0, si = 0.0, qr = 0.0, qi = 0.0;

  void add(cplx z) {
    sr += z.real();
    si += z.imag();
    qr += z.real() * z.real();
    qi += z.imag() * z.imag();
  }
  void add(double v) {
    sr += v;
    qr += v * v;
  }
  McEstimate finalize(long long n) const {
    McEstimate e;
    e.n_samples = n;
    const double mr = sr / double(n), mi = si / double(n);
    e.mean = {mr, mi};
    const double vr = std::max(0.0, qr / double(n) - mr * mr);
    const double vi = std::max(0.0, qi / double(n) - mi * mi);
    e.stderr_re = std::sqrt(vr / double(n));
    e.stderr_im = std::sqrt(vi / double(n));
    return e;
  }
};

McEstimate conj_est(const McEstimate& e) {
  McEstimate out = e;
  out.mean = std::conj(e.mean);
  return out;
}

}  // namespace

double z_score(const McEstimate& est, cplx reference) {
  auto comp = [](double diff, double se) {
    if (se > 0.0) return std::abs(diff) / se;
    return std::abs(diff) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  return std::max(comp(est.mean.real() - reference.real(), est.stderr_re),
                  comp(est.mean.imag() - reference.imag(), est.stderr_im));
}

const McEstimate& McStatsBatch::c_at(int k, int j, int m, int mp) const {
  static thread_local McEstimate mirrored;
  if (m <= mp) return c[((std::size_t(k) * K + j) * M + m) * M + mp];
  mirrored = conj_est(c[((std::size_t(k) * K + j) * M + mp) * M + m]);
  return mirrored;
}

const McEstimate& McStatsBatch::f_at(int k, int q, int j, int m, int mp) const {
  static thread_local McEstimate mirrored;
  if (m <= mp) return f[(((std::size_t(k) * M + q) * K + j) * M + m) * M + mp];
  mirrored = conj_est(f[(((std::size_t(k) * M + q) * K + j) * M + mp) * M + m]);
  return mirrored;
}

namespace {

/// Shared per-sample machinery: one realization plus estimates.
struct SampleCtx {
  ChannelRealization real;
  EstimationWorkspace ews;
  Eigen::MatrixXcd ghat;

  void draw(const ChannelStats& stats, const EstimationStats& est,
            const PilotAssignment& pilots, Rng& rng) {
    sample_realization_into(stats, rng, real);
    estimate_channels_into(real, pilots, est, rng, ews, ghat);
  }
};

}  // namespace

std::vector<McEstimate> mc_harvested_energy(
    const ChannelStats& stats, const EstimationStats& est,
    const PilotAssignment& pilots, const Allocation& alloc, double mu,
    double tau_harvest, long long n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_harvested_energy: need n_samples >= 2");
  const int M = stats.num_aps();
  const int K = stats.num_users();
  const Eigen::MatrixXd sqrt_p = alloc.p_dl.cwiseSqrt();
  const Eigen::VectorXd sqrt_eta = alloc.eta().cwiseSqrt();
  const double scale = mu * tau_harvest;

  std::vector<Acc> acc(static_cast<std::size_t>(K));
  SampleCtx ctx;
  Rng rng(seed);
  Eigen::VectorXcd row_sum(M);

  for (long long it = 0; it < n_samples; ++it) {
    ctx.draw(stats, est, pilots, rng);
    // Energy symbols are unit-modulus with uniform phase; data symbols are
    // unit-variance circular Gaussians. Harvester noise is omitted (energy
    // floor far below the transfer levels).
    for (int m = 0; m < M; ++m) {
      cplx t = 0.0;
      for (int j = 0; j < K; ++j)
        t += sqrt_p(m, j) * ctx.ghat(m, j) * rng.unit_phasor();
      row_sum[m] = t;
    }
    Eigen::VectorXcd x(K);
    for (int j = 0; j < K; ++j) x[j] = rng.complex_gaussian(1.0);

    for (int k = 0; k < K; ++k) {
      cplx v = 0.0;
      for (int m = 0; m < M; ++m) v += std::conj(ctx.real.ap_user(m, k)) * row_sum[m];
      for (int j = 0; j < K; ++j)
        v += sqrt_eta[j] * ctx.real.user_user(k, j) * x[j];
      acc[std::size_t(k)].add(scale * std::norm(v));
    }
  }

  std::vector<McEstimate> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) out[std::size_t(k)] = acc[std::size_t(k)].finalize(n_samples);
  return out;
}

McEstimate mc_stats_element(const ChannelStats& stats,
                            const EstimationStats& est,
                            const PilotAssignment& pilots,
                            const Eigen::VectorXd& rsi, const ElementId& which,
                            long long n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_stats_element: need n_samples >= 2");
  const int M = stats.num_aps();
  const int K = stats.num_users();
  auto in = [](int v, int hi) { return v >= 0 && v < hi; };
  const bool ok =
      in(which.k, K) && in(which.m, M) && in(which.mp, M) &&
      (which.kind == ElementId::Kind::B || which.kind == ElementId::Kind::D ||
       in(which.j, K)) &&
      (which.kind != ElementId::Kind::F || in(which.q, M));
  if (!ok) throw std::invalid_argument("mc_stats_element: element id out of range");
  if (rsi.size() != M)
    throw std::invalid_argument("mc_stats_element: rsi must have one entry per AP");

  Acc acc;
  SampleCtx ctx;
  Rng rng(seed);
  for (long long it = 0; it < n_samples; ++it) {
    ctx.draw(stats, est, pilots, rng);
    switch (which.kind) {
      case ElementId::Kind::B:
        acc.add(std::conj(ctx.ghat(which.m, which.k)) *
                ctx.real.ap_user(which.m, which.k));
        break;
      case ElementId::Kind::C:
        acc.add(std::conj(ctx.ghat(which.m, which.k)) *
                ctx.real.ap_user(which.m, which.j) *
                std::conj(ctx.real.ap_user(which.mp, which.j)) *
                ctx.ghat(which.mp, which.k));
        break;
      case ElementId::Kind::D: {
        const cplx n = rng.complex_gaussian(est.noise_power);
        acc.add(std::conj(ctx.ghat(which.m, which.k)) * n * std::conj(n) *
                ctx.ghat(which.m, which.k));
        break;
      }
      case ElementId::Kind::F: {
        const cplx u = std::sqrt(rsi[which.m]) *
                       std::conj(ctx.ghat(which.m, which.k)) *
                       ctx.real.ap_ap(which.m, which.q) *
                       ctx.ghat(which.q, which.j);
        const cplx v = std::sqrt(rsi[which.mp]) *
                       std::conj(ctx.ghat(which.mp, which.k)) *
                       ctx.real.ap_ap(which.mp, which.q) *
                       ctx.ghat(which.q, which.j);
        acc.add(u * std::conj(v));
        break;
      }
    }
  }
  return acc.finalize(n_samples);
}

std::vector<McSinrTerms> mc_sinr_terms(const ChannelStats& stats,
                                       const EstimationStats& est,
                                       const PilotAssignment& pilots,
                                       const Allocation& alloc,
                                       const Eigen::VectorXd& rsi,
                                       long long n_samples,
                                       std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_sinr_terms: need n_samples >= 2");
  const int M = stats.num_aps();
  const int K = stats.num_users();
  const Eigen::MatrixXd sqrt_p = alloc.p_dl.cwiseSqrt();
  const Eigen::VectorXd sqrt_rsi = rsi.cwiseSqrt();

  struct UserAcc {
    Acc gain;
    std::vector<Acc> data;
    Acc rsi_pow;
    Acc noise;
  };
  std::vector<UserAcc> acc(static_cast<std::size_t>(K));
  for (auto& a : acc) a.data.resize(static_cast<std::size_t>(K));

  SampleCtx ctx;
  Rng rng(seed);
  Eigen::VectorXcd ap_tx(M), rsi_at_ap(M), noise(M);

  for (long long it = 0; it < n_samples; ++it) {
    ctx.draw(stats, est, pilots, rng);
    // Signal radiated by each AP during the uplink phase, as received through
    // the inter-AP channels with the residual suppression applied.
    for (int q = 0; q < M; ++q) {
      cplx t = 0.0;
      for (int j = 0; j < K; ++j)
        t += sqrt_p(q, j) * ctx.ghat(q, j) * rng.unit_phasor();
      ap_tx[q] = t;
    }
    for (int m = 0; m < M; ++m) {
      cplx t = 0.0;
      for (int q = 0; q < M; ++q) t += ctx.real.ap_ap(m, q) * ap_tx[q];
      rsi_at_ap[m] = sqrt_rsi[m] * t;
      noise[m] = rng.complex_gaussian(est.noise_power);
    }
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXcd& a = alloc.alpha[std::size_t(k)];
      cplx gain = 0.0, rsi_comb = 0.0, noise_comb = 0.0;
      for (int m = 0; m < M; ++m) {
        const cplx w = std::conj(a[m]) * std::conj(ctx.ghat(m, k));
        gain += w * ctx.real.ap_user(m, k);
        rsi_comb += w * rsi_at_ap[m];
        noise_comb += w * noise[m];
      }
      acc[std::size_t(k)].gain.add(gain);
      acc[std::size_t(k)].rsi_pow.add(std::norm(rsi_comb));
      acc[std::size_t(k)].noise.add(std::norm(noise_comb));
      for (int j = 0; j < K; ++j) {
        cplx d = 0.0;
        for (int m = 0; m < M; ++m)
          d += std::conj(a[m]) * std::conj(ctx.ghat(m, k)) *
               ctx.real.ap_user(m, j);
        acc[std::size_t(k)].data[std::size_t(j)].add(std::norm(d));
      }
    }
  }

  std::vector<McSinrTerms> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    auto& a = acc[std::size_t(k)];
    auto& o = out[std::size_t(k)];
    o.combined_gain = a.gain.finalize(n_samples);
    o.rsi_power = a.rsi_pow.finalize(n_samples);
    o.noise_power = a.noise.finalize(n_samples);
    o.data_power.resize(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j)
      o.data_power[std::size_t(j)] = a.data[std::size_t(j)].finalize(n_samples);
  }
  return out;
}

McStatsBatch mc_all_stats_elements(const ChannelStats& stats,
                                   const EstimationStats& est,
                                   const PilotAssignment& pilots,
                                   const Eigen::VectorXd& rsi,
                                   const Allocation& alloc, double mu,
                                   double tau_harvest, long long n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_all_stats_elements: need n_samples >= 2");
  const int M = stats.num_aps();
  const int K = stats.num_users();
  if (rsi.size() != M)
    throw std::invalid_argument("mc_all_stats_elements: rsi size mismatch");

  const Eigen::MatrixXd sqrt_p = alloc.p_dl.cwiseSqrt();
  const Eigen::VectorXd sqrt_eta = alloc.eta().cwiseSqrt();
  const Eigen::VectorXd sqrt_rsi = rsi.cwiseSqrt();
  const double harvest_scale = mu * tau_harvest;

  std::vector<Acc> acc_b(std::size_t(M) * K), acc_d(std::size_t(M) * K);
  std::vector<Acc> acc_c(std::size_t(K) * K * M * M);
  std::vector<Acc> acc_f(std::size_t(K) * M * K * M * M);
  std::vector<Acc> acc_e(static_cast<std::size_t>(K));

  SampleCtx ctx;
  Rng rng(seed);
  Eigen::VectorXcd u(M), v(M), noise(M), row_sum(M), x(K);
  Eigen::MatrixXcd s_sym(M, K);

  for (long long it = 0; it < n_samples; ++it) {
    ctx.draw(stats, est, pilots, rng);
    for (int m = 0; m < M; ++m) noise[m] = rng.complex_gaussian(est.noise_power);
    for (int m = 0; m < M; ++m)
      for (int j = 0; j < K; ++j) s_sym(m, j) = rng.unit_phasor();
    for (int j = 0; j < K; ++j) x[j] = rng.complex_gaussian(1.0);

    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < K; ++k) {
        const cplx gh = ctx.ghat(m, k);
        acc_b[std::size_t(m) * K + k].add(std::conj(gh) * ctx.real.ap_user(m, k));
        acc_d[std::size_t(m) * K + k].add(std::norm(gh) * std::norm(noise[m]));
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) {
        for (int m = 0; m < M; ++m)
          u[m] = std::conj(ctx.ghat(m, k)) * ctx.real.ap_user(m, j);
        Acc* base = &acc_c[(std::size_t(k) * K + j) * M * M];
        for (int m = 0; m < M; ++m)
          for (int mp = m; mp < M; ++mp)
            base[std::size_t(m) * M + mp].add(u[m] * std::conj(u[mp]));
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int q = 0; q < M; ++q) {
        for (int j = 0; j < K; ++j) {
          const cplx gq = ctx.ghat(q, j);
          for (int m = 0; m < M; ++m)
            v[m] = sqrt_rsi[m] * std::conj(ctx.ghat(m, k)) *
                   ctx.real.ap_ap(m, q) * gq;
          Acc* base = &acc_f[((std::size_t(k) * M + q) * K + j) * M * M];
          for (int m = 0; m < M; ++m)
            for (int mp = m; mp < M; ++mp)
              base[std::size_t(m) * M + mp].add(v[m] * std::conj(v[mp]));
        }
      }
    }
    for (int m = 0; m < M; ++m) {
      cplx t = 0.0;
      for (int j = 0; j < K; ++j) t += sqrt_p(m, j) * ctx.ghat(m, j) * s_sym(m, j);
      row_sum[m] = t;
    }
    for (int k = 0; k < K; ++k) {
      cplx e = 0.0;
      for (int m = 0; m < M; ++m) e += std::conj(ctx.real.ap_user(m, k)) * row_sum[m];
      for (int j = 0; j < K; ++j) e += sqrt_eta[j] * ctx.real.user_user(k, j) * x[j];
      acc_e[std::size_t(k)].add(harvest_scale * std::norm(e));
    }
  }

  McStatsBatch out;
  out.M = M;
  out.K = K;
  out.b.resize(acc_b.size());
  out.c.resize(acc_c.size());
  out.d.resize(acc_d.size());
  out.f.resize(acc_f.size());
  out.harvested.resize(acc_e.size());
  for (std::size_t i = 0; i < acc_b.size(); ++i) out.b[i] = acc_b[i].finalize(n_samples);
  for (std::size_t i = 0; i < acc_c.size(); ++i) out.c[i] = acc_c[i].finalize(n_samples);
  for (std::size_t i = 0; i < acc_d.size(); ++i) out.d[i] = acc_d[i].finalize(n_samples);
  for (std::size_t i = 0; i < acc_f.size(); ++i) out.f[i] = acc_f[i].finalize(n_samples);
  for (std::size_t i = 0; i < acc_e.size(); ++i) out.harvested[i] = acc_e[i].finalize(n_samples);
  return out;
}

}  // namespace cfser
