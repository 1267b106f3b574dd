#include "cfser/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace cfser {

namespace {

// The LP works on the radiated downlink powers gamma(m,k) * p(m,k) rather
// than the per-estimate coefficients p directly: the precoder normalization
// puts p around 1/gamma (~1e7 W) while the uplink powers sit at microwatts,
// and that spread buries the harvesting pathway below any workable pivot
// tolerance. In radiated units every AP power row has unit coefficients.
std::string var_name(int M, int K, int idx) {
  if (idx < M * K)
    return "prad_" + std::to_string(idx / K) + "_" + std::to_string(idx % K);
  idx -= M * K;
  if (idx < K) return "etaE_" + std::to_string(idx);
  return "etaB_" + std::to_string(idx - K);
}

Eigen::VectorXd flatten_p(const Eigen::MatrixXd& p) {
  const int M = int(p.rows()), K = int(p.cols());
  Eigen::VectorXd v(M * K);
  for (int q = 0; q < M; ++q)
    for (int j = 0; j < K; ++j) v[q * K + j] = p(q, j);
  return v;
}

}  // namespace

LinearProgram build_lp(const StatsMatrices& sm, const HarvestCoefficients& hc,
                       const EstimationStats& est,
                       const std::vector<Eigen::VectorXcd>& alpha,
                       const Eigen::VectorXd& gamma_th, double tau_u,
                       double e_max, double p_max) {
  const int M = sm.M, K = sm.K;
  const int np = M * K;
  const int n = np + 2 * K;
  auto eta_e_idx = [np](int j) { return np + j; };
  auto eta_b_idx = [np, K](int j) { return np + K + j; };

  LinearProgram lp = LinearProgram::with_vars(n);
  for (int idx = 0; idx < n; ++idx) lp.var_names[std::size_t(idx)] = var_name(M, K, idx);
  for (int j = 0; j < K; ++j) lp.objective[eta_b_idx(j)] = tau_u;

  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd& a = alpha[std::size_t(k)];
    const Eigen::VectorXd a2 = a.cwiseAbs2();
    const double gth = gamma_th[k];

    if (gth > 0.0) {
      const double signal = std::norm(cplx(a.adjoint() * sm.b.col(k)));
      const Eigen::VectorXd re = a.real(), im = a.imag();
      const Eigen::VectorXd fq =
          sm.f_diag[std::size_t(k)].transpose() * a2;  // per p(q,j)
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
      for (int q = 0; q < M; ++q)
        for (int j = 0; j < K; ++j)
          row[q * K + j] = -gth * fq[q * K + j] / est.gamma(q, j);
      for (int j = 0; j < K; ++j) {
        const Eigen::MatrixXd& C = sm.c_mat(k, j);
        double ckj = re.dot(C * re) + im.dot(C * im);
        double coef = -gth * ckj;
        if (j == k) coef += (1.0 + gth) * signal;
        row[eta_e_idx(j)] = coef;
        row[eta_b_idx(j)] = coef;
      }
      const double noise = a2.dot(sm.d.col(k));
      lp.add_constraint(std::move(row), Relation::GreaterEq, gth * noise,
                        "sinr_" + std::to_string(k));
    }

    Eigen::VectorXd hrow = Eigen::VectorXd::Zero(n);
    const auto& ap = hc.from_ap[std::size_t(k)];
    const auto& cont = hc.contamination[std::size_t(k)];
    for (int m = 0; m < M; ++m)
      for (int j = 0; j < K; ++j)
        hrow[m * K + j] = -(ap(m, j) + cont(m, j)) / est.gamma(m, j);
    for (int j = 0; j < K; ++j) {
      hrow[eta_e_idx(j)] -= hc.from_users(k, j);
      hrow[eta_b_idx(j)] -= hc.from_users(k, j);
    }
    hrow[eta_e_idx(k)] += tau_u;
    lp.add_constraint(std::move(hrow), Relation::LessEq, 0.0,
                      "harvest_" + std::to_string(k));

    Eigen::VectorXd brow = Eigen::VectorXd::Zero(n);
    brow[eta_b_idx(k)] = tau_u;
    lp.add_constraint(std::move(brow), Relation::LessEq, e_max,
                      "battery_" + std::to_string(k));
  }

  for (int m = 0; m < M; ++m) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < K; ++k) row[m * K + k] = 1.0;
    lp.add_constraint(std::move(row), Relation::LessEq, p_max,
                      "ap_power_" + std::to_string(m));
  }
  return lp;
}

std::vector<Eigen::VectorXcd> update_filters(const StatsMatrices& sm,
                                             const Allocation& alloc) {
  const int M = sm.M, K = sm.K;
  const Eigen::VectorXd eta = alloc.eta();
  const Eigen::VectorXd pv = flatten_p(alloc.p_dl);

  std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(M, M);
    for (int j = 0; j < K; ++j)
      if (eta[j] != 0.0) sigma += eta[j] * sm.c_mat(k, j);
    const Eigen::VectorXd fagg = sm.f_diag[std::size_t(k)] * pv;
    sigma.diagonal() += fagg;
    sigma.diagonal() += sm.d.col(k);

    const Eigen::VectorXd b = sm.b.col(k).real();
    if (b.norm() == 0.0)
      throw std::domain_error("update_filters: zero gain vector");

    // Diagonal equilibration before the symmetric solve; the per-AP scales
    // span several orders of magnitude.
    Eigen::VectorXd s(M);
    for (int m = 0; m < M; ++m)
      s[m] = sigma(m, m) > 0.0 ? 1.0 / std::sqrt(sigma(m, m)) : 1.0;
    const Eigen::MatrixXd scaled =
        s.asDiagonal() * sigma * s.asDiagonal();
    const Eigen::VectorXd rhs = s.cwiseProduct(b);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    if (ldlt.info() != Eigen::Success)
      throw std::domain_error("update_filters: singular statistics matrix");
    Eigen::VectorXd y = ldlt.solve(rhs);
    Eigen::VectorXd a = s.cwiseProduct(y);
    const double nrm = a.norm();
    if (!(nrm > 0.0) || !a.allFinite())
      throw std::domain_error("update_filters: degenerate solve");
    a /= nrm;
    out[std::size_t(k)] = a.cast<cplx>();
  }
  return out;
}

namespace {

Allocation extract_allocation(const Eigen::VectorXd& x, int M, int K,
                              const Eigen::MatrixXd& gamma,
                              const std::vector<Eigen::VectorXcd>& alpha) {
  Allocation a = Allocation::zeros(M, K);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) a.p_dl(m, k) = x[m * K + k] / gamma(m, k);
  for (int j = 0; j < K; ++j) {
    a.eta_e[j] = x[M * K + j];
    a.eta_b[j] = x[M * K + K + j];
  }
  a.alpha = alpha;
  return a;
}

}  // namespace

OptimizerOutcome optimize_with_stats(const StatsMatrices& sm,
                                     const HarvestCoefficients& hc,
                                     const EstimationStats& est,
                                     const Eigen::VectorXd& gamma_th,
                                     double tau_u, double tau_c, double e_max,
                                     double p_max, const OptimizerConfig& cfg) {
  const int M = sm.M, K = sm.K;
  OptimizerOutcome out;
  std::vector<Eigen::VectorXcd> alpha(
      static_cast<std::size_t>(K), Eigen::VectorXcd::Ones(M));

  double prev = 0.0;
  for (int l = 0; l < cfg.max_iterations; ++l) {
    const LinearProgram lp =
        build_lp(sm, hc, est, alpha, gamma_th, tau_u, e_max, p_max);
    const LpSolution sol = cfser::solve(lp, cfg.lp);
    if (sol.status != LpStatus::Optimal) {
      if (l == 0) {
        out.feasible = false;  // outage: no feasible point at the initial filters
        return out;
      }
      out.solver_anomaly = true;  // must not happen: the previous point stays feasible
      break;
    }
    out.lp_recheck_violation =
        std::max(out.lp_recheck_violation, max_relative_violation(lp, sol.x));
    out.allocation = extract_allocation(sol.x, M, K, est.gamma, alpha);
    const double obj = sol.objective_value;

    if (!out.objective_trace.empty() &&
        obj > prev + cfg.eps_mono * std::max(1.0, std::abs(prev)))
      out.solver_anomaly = true;
    out.objective_trace.push_back(obj);
    if (!out.objective_trace.empty() && out.objective_trace.size() > 1 &&
        std::abs(prev - obj) <= cfg.eps_conv * std::max(1.0, std::abs(obj))) {
      out.converged = true;
      break;
    }
    prev = obj;
    if (l + 1 >= cfg.max_iterations) break;
    alpha = update_filters(sm, out.allocation);
  }
  out.iterations = static_cast<int>(out.objective_trace.size());
  out.feasible = !out.objective_trace.empty();
  if (!out.feasible) return out;

  if (cfg.maximize_harvest_draw) {
    LinearProgram lp = build_lp(sm, hc, est, out.allocation.alpha, gamma_th,
                                tau_u, e_max, p_max);
    lp.objective.setZero();
    for (int j = 0; j < K; ++j) {
      lp.objective[M * K + j] = -1.0;
      lp.lower_bounds[M * K + K + j] = out.allocation.eta_b[j];
      lp.upper_bounds[M * K + K + j] = out.allocation.eta_b[j];
    }
    const LpSolution sol = cfser::solve(lp, cfg.lp);
    if (sol.status == LpStatus::Optimal) {
      out.lp_recheck_violation =
          std::max(out.lp_recheck_violation, max_relative_violation(lp, sol.x));
      out.allocation = extract_allocation(sol.x, M, K, est.gamma, out.allocation.alpha);
    }
  }

  out.per_user_se.resize(K);
  out.battery_fraction.resize(K);
  for (int k = 0; k < K; ++k) {
    const double sinr = effective_sinr(sm, out.allocation, k);
    out.per_user_se[k] = spectral_efficiency(sinr, tau_u, tau_c);
    const double total = out.allocation.eta_e[k] + out.allocation.eta_b[k];
    out.battery_fraction[k] = total > 0.0 ? out.allocation.eta_b[k] / total : 0.0;
  }
  return out;
}

namespace {

Eigen::VectorXd thresholds_for(const Eigen::VectorXd& rates, double tau_u,
                               double tau_c) {
  Eigen::VectorXd g(rates.size());
  for (int k = 0; k < rates.size(); ++k)
    g[k] = sinr_threshold(rates[k], tau_u, tau_c);
  return g;
}

}  // namespace

OptimizerOutcome optimize(const ChannelStats& stats, const EstimationStats& est,
                          const PilotAssignment& pilots,
                          const SystemParams& sys, const OptimizerConfig& cfg) {
  const int K = stats.num_users();
  if (sys.rate_thresholds.size() != K)
    throw std::invalid_argument("optimize: one rate threshold per user required");
  const double tau_u = sys.tau_c - sys.tau_p;
  if (!(tau_u > 0)) throw std::invalid_argument("optimize: tau_c must exceed tau_p");

  const Eigen::VectorXd rsi =
      Eigen::VectorXd::Constant(stats.num_aps(), sys.rsi_linear);
  const StatsMatrices sm = stats_matrices(est, stats, pilots, rsi);
  const HarvestCoefficients hc =
      harvest_coefficients(est, stats, pilots, sys.mu, tau_u);
  const Eigen::VectorXd gth =
      thresholds_for(sys.rate_thresholds, tau_u, sys.tau_c);
  return optimize_with_stats(sm, hc, est, gth, tau_u, sys.tau_c,
                             sys.e_max_joules, sys.p_max_watts, cfg);
}

OptimizerOutcome optimize_ts_baseline(const ChannelStats& stats,
                                      const EstimationStats& est,
                                      const PilotAssignment& pilots,
                                      const SystemParams& sys, int tau_d,
                                      const OptimizerConfig& cfg) {
  const int K = stats.num_users();
  if (sys.rate_thresholds.size() != K)
    throw std::invalid_argument("optimize_ts_baseline: one rate threshold per user required");
  if (tau_d < 0)
    throw std::invalid_argument("optimize_ts_baseline: tau_d must be >= 0");
  const double tau_u = sys.tau_c - sys.tau_p - tau_d;
  if (!(tau_u > 0))
    throw std::invalid_argument("optimize_ts_baseline: tau_p + tau_d must leave uplink samples");

  const Eigen::VectorXd rsi = Eigen::VectorXd::Zero(stats.num_aps());
  const StatsMatrices sm = stats_matrices(est, stats, pilots, rsi);
  HarvestCoefficients hc =
      harvest_coefficients(est, stats, pilots, sys.mu, double(tau_d));
  hc.from_users.setZero();  // users are silent during the dedicated phase
  const Eigen::VectorXd gth =
      thresholds_for(sys.rate_thresholds, tau_u, sys.tau_c);
  return optimize_with_stats(sm, hc, est, gth, tau_u, sys.tau_c,
                             sys.e_max_joules, sys.p_max_watts, cfg);
}

}  // namespace cfser
