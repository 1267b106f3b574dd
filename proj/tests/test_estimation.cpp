#include <doctest.h>

#include <cmath>

#include "cfser/estimation.hpp"

using namespace cfser;

namespace {

// Single-AP stats with explicit per-user (beta, los) pairs.
ChannelStats make_stats(const std::vector<std::pair<double, double>>& links) {
  const int K = static_cast<int>(links.size());
  ChannelStats st;
  st.ap_user = Grid<LinkStats>(1, K);
  st.user_user = Grid<LinkStats>(K, K);
  st.ap_ap = Grid<LinkStats>(1, 1);
  for (int k = 0; k < K; ++k) {
    const auto [beta, los] = links[std::size_t(k)];
    st.ap_user(0, k) = {beta, los, los * los + beta, los > 0.0};
  }
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j) st.user_user(k, j) = {0.1, 0.0, 0.1, false};
  st.ap_ap(0, 0) = {0.05, 0.0, 0.05, false};
  return st;
}

}  // namespace

TEST_SUITE_BEGIN("estimation");

TEST_CASE("pilot assignment structure") {
  SUBCASE("copilot sets are consistent") {
    const PilotAssignment pa = assign_pilots(4, 2, 9);
    for (int k = 0; k < 4; ++k) {
      CHECK(pa.pilot_index[k] >= 0);
      CHECK(pa.pilot_index[k] < 2);
      bool self = false;
      for (int j : pa.copilot[k]) {
        CHECK(pa.pilot_index[j] == pa.pilot_index[k]);
        if (j == k) self = true;
      }
      CHECK(self);
    }
    // sum over users of |P_k| equals sum over groups of (group size)^2
    std::size_t lhs = 0;
    for (int k = 0; k < 4; ++k) lhs += pa.copilot[std::size_t(k)].size();
    std::size_t rhs = 0;
    for (const auto& g : pa.groups) rhs += g.size() * g.size();
    CHECK(lhs == rhs);
  }
  SUBCASE("singleton") {
    const PilotAssignment pa = assign_pilots(1, 3, 1);
    REQUIRE(pa.copilot[0].size() == 1);
    CHECK(pa.copilot[0][0] == 0);
  }
  SUBCASE("forced orthogonal indices give singleton sets") {
    const PilotAssignment pa = PilotAssignment::from_indices({0, 1, 2, 3}, 4);
    for (int k = 0; k < 4; ++k) CHECK(pa.copilot[std::size_t(k)].size() == 1);
  }
}

TEST_CASE("estimation statistics formulas") {
  SUBCASE("single user, unit gains") {
    const ChannelStats st = make_stats({{1.0, 0.0}});
    const auto pa = PilotAssignment::from_indices({0}, 1);
    const EstimationStats est = compute_estimation_stats(st, pa, 1, 1.0, 1.0);
    CHECK(est.psi(0, 0) == doctest::Approx(2.0));
    CHECK(est.gamma(0, 0) == doctest::Approx(0.5));
    CHECK(est.c_err(0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("gamma + c = w for every link") {
    const ChannelStats st = make_stats({{0.5, 0.4}, {1.2, 0.0}, {0.3, 0.9}});
    const auto pa = PilotAssignment::from_indices({0, 0, 1}, 2);
    const EstimationStats est = compute_estimation_stats(st, pa, 2, 0.1, 1e-3);
    for (int k = 0; k < 3; ++k)
      CHECK(est.gamma(0, k) + est.c_err(0, k) ==
            doctest::Approx(st.ap_user(0, k).w).epsilon(1e-14));
  }
  SUBCASE("contamination-limited gamma at huge pilot power") {
    const ChannelStats st = make_stats({{1.0, 0.0}, {2.0, 0.0}});
    const auto pa = PilotAssignment::from_indices({0, 0}, 1);
    const EstimationStats est = compute_estimation_stats(st, pa, 1, 1e6, 1.0);
    const double w0 = 1.0, sum_w = 3.0;
    CHECK(est.gamma(0, 0) == doctest::Approx(w0 * w0 / sum_w).epsilon(1e-5));
  }
  SUBCASE("two equal copilot users halve the ceiling") {
    const ChannelStats st = make_stats({{1.0, 0.0}, {1.0, 0.0}});
    const auto pa = PilotAssignment::from_indices({0, 0}, 1);
    const EstimationStats est = compute_estimation_stats(st, pa, 1, 1.0, 0.5);
    CHECK(est.gamma(0, 0) == doctest::Approx(1.0 / 2.5));
    CHECK(est.gamma(0, 0) < 0.5);
  }
}

TEST_CASE("noiseless single-user estimate recovers the channel") {
  const ChannelStats st = make_stats({{0.7, 0.5}});
  const auto pa = PilotAssignment::from_indices({0}, 1);
  const EstimationStats est = compute_estimation_stats(st, pa, 2, 0.3, 0.0);
  const ChannelRealization r = sample_realization(st, 3);
  const Eigen::MatrixXcd ghat = estimate_channels(r, pa, est, 4);
  CHECK(std::abs(ghat(0, 0) - r.ap_user(0, 0)) < 1e-12);
}

TEST_CASE("estimate variance, orthogonality and cross-pilot independence") {
  const ChannelStats st = make_stats({{0.8, 0.4}, {0.5, 0.0}, {0.9, 0.3}});
  const auto pa = PilotAssignment::from_indices({0, 0, 1}, 2);
  const EstimationStats est = compute_estimation_stats(st, pa, 2, 0.2, 0.05);

  const long long n = 400000;
  Rng rng(12345);
  EstimationWorkspace ws;
  ChannelRealization r;
  Eigen::MatrixXcd ghat;
  double var0 = 0.0;
  cplx orth0 = 0.0;   // E[ghat* (g - ghat)]
  cplx cross = 0.0;   // estimates on different pilots
  for (long long i = 0; i < n; ++i) {
    sample_realization_into(st, rng, r);
    estimate_channels_into(r, pa, est, rng, ws, ghat);
    var0 += std::norm(ghat(0, 0));
    orth0 += std::conj(ghat(0, 0)) * (r.ap_user(0, 0) - ghat(0, 0));
    cross += std::conj(ghat(0, 0)) * ghat(0, 2);
  }
  const double g0 = est.gamma(0, 0);
  CHECK(var0 / double(n) == doctest::Approx(g0).epsilon(0.01));
  CHECK(std::abs(orth0 / double(n)) < 4.0 * g0 / std::sqrt(double(n)) * 3.0);
  CHECK(std::abs(cross / double(n)) < 4.0 * g0 / std::sqrt(double(n)) * 3.0);
}

TEST_CASE("projected-noise shortcut agrees with the full pilot-length path") {
  // Reference path: materialize tau_p-length orthonormal pilots, build the
  // full received block with per-sample noise, project, scale. Distributional
  // agreement is checked through the estimate variance.
  const ChannelStats st = make_stats({{0.8, 0.4}, {0.5, 0.2}});
  const int tau_p = 2;
  const auto pa = PilotAssignment::from_indices({0, 1}, tau_p);
  const double rho_p = 0.2, noise = 0.05;
  const EstimationStats est = compute_estimation_stats(st, pa, tau_p, rho_p, noise);

  const long long n = 300000;
  Rng rng(777);
  ChannelRealization r;
  double var_full = 0.0;
  // identity pilot book: phi_k = e_k
  for (long long i = 0; i < n; ++i) {
    sample_realization_into(st, rng, r);
    Eigen::VectorXcd y(tau_p);
    for (int t = 0; t < tau_p; ++t) y[t] = rng.complex_gaussian(noise);
    for (int k = 0; k < 2; ++k)
      y[pa.pilot_index[std::size_t(k)]] +=
          std::sqrt(tau_p * rho_p) * r.ap_user(0, k);
    const cplx ycheck0 = y[0];  // projection onto phi_0
    const cplx ghat0 =
        std::sqrt(tau_p * rho_p) * est.w(0, 0) / est.psi(0, 0) * ycheck0;
    var_full += std::norm(ghat0);
  }
  CHECK(var_full / double(n) == doctest::Approx(est.gamma(0, 0)).epsilon(0.015));
}

TEST_SUITE_END();
