#include "cfser/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cfser/campaign.hpp"

namespace cfser {

OracleSummary summarize(const std::vector<OracleEntry>& entries) {
  OracleSummary s;
  s.n = entries.size();
  std::size_t within3 = 0;
  for (const auto& e : entries) {
    s.max_abs_z = std::max(s.max_abs_z, e.z);
    if (e.z <= 3.0) ++within3;
    if (e.z > 5.0) ++s.n_over_5;
  }
  s.frac_within_3 = s.n ? double(within3) / double(s.n) : 1.0;
  return s;
}

namespace {

std::string idx2(const char* base, int a, int b) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s[%d,%d]", base, a, b);
  return buf;
}

std::string idx4(const char* base, int a, int b, int c, int d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s[%d,%d,%d,%d]", base, a, b, c, d);
  return buf;
}

std::string idx5(const char* base, int a, int b, int c, int d, int e) {
  char buf[72];
  std::snprintf(buf, sizeof(buf), "%s[%d,%d,%d,%d,%d]", base, a, b, c, d, e);
  return buf;
}

OracleEntry make_entry(const std::string& instance, std::string element,
                       cplx cf, const McEstimate& mc) {
  OracleEntry e;
  e.instance = instance;
  e.element = std::move(element);
  e.closed_form = cf;
  e.mc_mean = mc.mean;
  e.stderr_re = mc.stderr_re;
  e.stderr_im = mc.stderr_im;
  e.z = z_score(mc, cf);
  return e;
}

struct Instance {
  std::string label;
  ChannelStats stats;
  PilotAssignment pilots;
  EstimationStats est;
  Eigen::VectorXd rsi;
  Allocation alloc;
};

std::vector<Instance> build_grid(const Scenario& scenario, std::uint64_t seed) {
  std::vector<Instance> grid;
  std::uint64_t idx = 0;
  for (int M : {1, 2, 4}) {
    for (int K : {1, 2}) {
      std::vector<std::pair<std::string, PilotAssignment>> pilot_variants;
      if (K == 1) {
        pilot_variants.emplace_back("solo", PilotAssignment::from_indices({0}, 1));
      } else {
        pilot_variants.emplace_back("shared",
                                    PilotAssignment::from_indices({0, 0}, 1));
        pilot_variants.emplace_back("orthogonal",
                                    PilotAssignment::from_indices({0, 1}, 2));
      }
      for (auto& [pname, pilots] : pilot_variants) {
        for (bool with_rsi : {false, true}) {
          ++idx;
          Instance inst;
          inst.label = "M" + std::to_string(M) + "_K" + std::to_string(K) +
                       "_" + pname + (with_rsi ? "_rsi" : "_norsi");
          const Deployment dep = generate_deployment(
              M, K, scenario.side_length_m, scenario.height_diff_m,
              substream_seed(seed, idx, 1));
          inst.stats = compute_channel_stats(dep, scenario.propagation,
                                             substream_seed(seed, idx, 2));
          inst.pilots = pilots;
          inst.est = compute_estimation_stats(inst.stats, inst.pilots,
                                              inst.pilots.tau_p,
                                              scenario.rho_p_watts,
                                              scenario.noise_watts());
          inst.rsi = Eigen::VectorXd::Constant(
              M, with_rsi ? scenario.rsi_linear() : 0.0);

          Rng rng(substream_seed(seed, idx, 3));
          inst.alloc = Allocation::zeros(M, K);
          for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
              inst.alloc.p_dl(m, k) = rng.uniform(0.2, 1.0) *
                                      scenario.p_max_watts /
                                      (K * inst.est.gamma(m, k));
          for (int k = 0; k < K; ++k)
            inst.alloc.eta_e[k] = rng.uniform(0.2, 1.0) * scenario.e_max_joules /
                                  scenario.tau_u();
          grid.push_back(std::move(inst));
        }
      }
    }
  }
  return grid;
}

}  // namespace

OracleReport validate_closed_forms(const Scenario& scenario,
                                   long long n_samples, std::uint64_t seed,
                                   int tau_variant) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleReport report;
  report.n_samples = n_samples;
  report.tau_variant_coef = double(tau_variant) * scenario.rho_p_watts;

  const std::vector<Instance> grid = build_grid(scenario, seed);
  std::uint64_t inst_idx = 0;
  for (const Instance& inst : grid) {
    ++inst_idx;
    const int M = inst.stats.num_aps();
    const int K = inst.stats.num_users();
    const double tau_h = scenario.tau_u();

    const McStatsBatch mc = mc_all_stats_elements(
        inst.stats, inst.est, inst.pilots, inst.rsi, inst.alloc, scenario.mu,
        tau_h, n_samples, substream_seed(seed, inst_idx, 17));

    const StatsMatrices prim =
        stats_matrices(inst.est, inst.stats, inst.pilots, inst.rsi);
    StatsMatrixOptions tau_opt;
    tau_opt.pilot_energy_coef = report.tau_variant_coef;
    const StatsMatrices var_tau =
        stats_matrices(inst.est, inst.stats, inst.pilots, inst.rsi, tau_opt);
    StatsMatrixOptions f_opt;
    f_opt.f_same_ap_aggregate_variant = true;
    const StatsMatrices var_f =
        stats_matrices(inst.est, inst.stats, inst.pilots, inst.rsi, f_opt);
    const HarvestCoefficients hc = harvest_coefficients(
        inst.est, inst.stats, inst.pilots, scenario.mu, tau_h);

    auto push_variant = [&](std::vector<OracleEntry>& dst, cplx cf_prim,
                            cplx cf_var, const std::string& element,
                            const McEstimate& est) {
      if (std::abs(cf_var - cf_prim) == 0.0) return;
      dst.push_back(make_entry(inst.label, element, cf_var, est));
    };

    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < K; ++k) {
        const McEstimate& eb = mc.b_at(m, k);
        report.primary.push_back(
            make_entry(inst.label, idx2("b", m, k), prim.b(m, k), eb));
        push_variant(report.variant_tau, prim.b(m, k), var_tau.b(m, k),
                     idx2("b", m, k), eb);

        const McEstimate& ed = mc.d_at(m, k);
        report.primary.push_back(
            make_entry(inst.label, idx2("d", m, k), prim.d(m, k), ed));
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) {
        for (int m = 0; m < M; ++m) {
          for (int mp = m; mp < M; ++mp) {
            const McEstimate& ec = mc.c_at(k, j, m, mp);
            const cplx cf = prim.c_mat(k, j)(m, mp);
            report.primary.push_back(
                make_entry(inst.label, idx4("c", k, j, m, mp), cf, ec));
            push_variant(report.variant_tau, cf, var_tau.c_mat(k, j)(m, mp),
                         idx4("c", k, j, m, mp), ec);
          }
        }
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int q = 0; q < M; ++q) {
        for (int j = 0; j < K; ++j) {
          for (int m = 0; m < M; ++m) {
            for (int mp = m; mp < M; ++mp) {
              const McEstimate& ef = mc.f_at(k, q, j, m, mp);
              const double cf =
                  m == mp ? prim.f_diag[std::size_t(k)](m, q * K + j) : 0.0;
              report.primary.push_back(
                  make_entry(inst.label, idx5("f", k, q, j, m, mp), cf, ef));
              const double cf_tau =
                  m == mp ? var_tau.f_diag[std::size_t(k)](m, q * K + j) : 0.0;
              push_variant(report.variant_tau, cf, cf_tau,
                           idx5("f", k, q, j, m, mp), ef);
              const double cf_f =
                  m == mp ? var_f.f_diag[std::size_t(k)](m, q * K + j) : 0.0;
              push_variant(report.variant_f, cf, cf_f,
                           idx5("f", k, q, j, m, mp), ef);
            }
          }
        }
      }
    }
    const Eigen::VectorXd eta = inst.alloc.eta();
    for (int k = 0; k < K; ++k) {
      const double cf = hc.evaluate(k, inst.alloc.p_dl, eta);
      const McEstimate& ee = mc.harvested[std::size_t(k)];
      report.primary.push_back(
          make_entry(inst.label, "E[" + std::to_string(k) + "]", cf, ee));
      EnergyLogEntry log;
      log.instance = inst.label;
      log.user = k;
      log.closed_form = cf;
      log.mc_mean = ee.mean.real();
      log.stderr_ = ee.stderr_re;
      log.z = z_score(ee, cf);
      log.mc_mean_ge_closed_form = ee.mean.real() >= cf;
      report.energy.push_back(log);
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

namespace {

nlohmann::json entry_json(const OracleEntry& e) {
  nlohmann::json j;
  j["instance"] = e.instance;
  j["element"] = e.element;
  j["closed_form_re"] = e.closed_form.real();
  j["closed_form_im"] = e.closed_form.imag();
  j["mc_mean_re"] = e.mc_mean.real();
  j["mc_mean_im"] = e.mc_mean.imag();
  j["stderr_re"] = e.stderr_re;
  j["stderr_im"] = e.stderr_im;
  j["z"] = e.z;
  return j;
}

nlohmann::json summary_json(const std::vector<OracleEntry>& entries) {
  const OracleSummary s = summarize(entries);
  nlohmann::json j;
  j["n_elements"] = s.n;
  j["max_abs_z"] = s.max_abs_z;
  j["frac_within_3"] = s.frac_within_3;
  j["n_over_5"] = s.n_over_5;
  return j;
}

}  // namespace

void write_report_json(const OracleReport& report, const std::string& path) {
  nlohmann::json j;
  j["n_samples"] = report.n_samples;
  j["runtime_seconds"] = report.runtime_seconds;
  j["gate_passed"] = report.gate_passed();
  j["primary_summary"] = summary_json(report.primary);
  j["variant_tau_summary"] = summary_json(report.variant_tau);
  j["variant_tau_coef"] = report.tau_variant_coef;
  j["variant_f_summary"] = summarize(report.variant_f).n
                               ? summary_json(report.variant_f)
                               : nlohmann::json::object();

  auto dump = [&](const char* key, const std::vector<OracleEntry>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : v) arr.push_back(entry_json(e));
    j[key] = std::move(arr);
  };
  dump("primary", report.primary);
  dump("variant_tau", report.variant_tau);
  dump("variant_f", report.variant_f);

  nlohmann::json energy = nlohmann::json::array();
  for (const auto& e : report.energy) {
    nlohmann::json je;
    je["instance"] = e.instance;
    je["user"] = e.user;
    je["closed_form"] = e.closed_form;
    je["mc_mean"] = e.mc_mean;
    je["stderr"] = e.stderr_;
    je["z"] = e.z;
    je["mc_mean_ge_closed_form"] = e.mc_mean_ge_closed_form;
    energy.push_back(je);
  }
  j["energy_log"] = std::move(energy);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string report_summary_text(const OracleReport& report) {
  std::ostringstream os;
  const OracleSummary p = summarize(report.primary);
  const OracleSummary t = summarize(report.variant_tau);
  const OracleSummary f = summarize(report.variant_f);
  os << "oracle elements: " << p.n << ", max |z| = " << p.max_abs_z
     << ", within 3 sigma: " << 100.0 * p.frac_within_3 << "%, over 5 sigma: "
     << p.n_over_5 << "\n";
  os << "variant (pilot energy coef " << report.tau_variant_coef
     << "): " << t.n << " differing elements, " << t.n_over_5
     << " rejected at 5 sigma, max |z| = " << t.max_abs_z << "\n";
  os << "variant (aggregate same-AP F branch): " << f.n
     << " differing elements, " << f.n_over_5
     << " rejected at 5 sigma, max |z| = " << f.max_abs_z << "\n";
  std::size_t above = 0;
  for (const auto& e : report.energy)
    if (e.mc_mean_ge_closed_form) ++above;
  os << "harvested-energy log: " << above << "/" << report.energy.size()
     << " sampled means at or above the closed form\n";
  os << "runtime: " << report.runtime_seconds << " s, samples per element: "
     << report.n_samples << "\n";
  os << (report.gate_passed() ? "GATE PASSED" : "GATE FAILED") << "\n";
  return os.str();
}

}  // namespace cfser
