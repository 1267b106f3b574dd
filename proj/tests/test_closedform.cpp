#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "cfser/closedform.hpp"

using namespace cfser;

namespace {

ChannelStats small_stats(int M, int K, std::uint64_t seed, double los_every = 0.0) {
  ChannelStats st;
  st.ap_user = Grid<LinkStats>(M, K);
  st.user_user = Grid<LinkStats>(K, K);
  st.ap_ap = Grid<LinkStats>(M, M);
  Rng rng(seed);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      const double beta = rng.uniform(0.3, 1.5);
      const double los = los_every > 0.0 ? rng.uniform(0.1, los_every) : 0.0;
      st.ap_user(m, k) = {beta, los, los * los + beta, los > 0.0};
    }
  for (int k = 0; k < K; ++k)
    for (int j = k; j < K; ++j) {
      const double beta = rng.uniform(0.02, 0.2);
      st.user_user(k, j) = st.user_user(j, k) = {beta, 0.0, beta, false};
    }
  for (int m = 0; m < M; ++m)
    for (int q = m; q < M; ++q) {
      const double beta = rng.uniform(0.01, 0.1);
      st.ap_ap(m, q) = st.ap_ap(q, m) = {beta, 0.0, beta, false};
    }
  return st;
}

}  // namespace

TEST_SUITE_BEGIN("closedform");

TEST_CASE("harvest coefficients: homogeneous linear form") {
  const ChannelStats st = small_stats(3, 2, 5, 0.8);
  const auto pa = PilotAssignment::from_indices({0, 0}, 1);
  const EstimationStats est = compute_estimation_stats(st, pa, 1, 0.5, 0.1);
  const HarvestCoefficients hc = harvest_coefficients(est, st, pa, 0.5, 198.0);

  const Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(3, 2);
  const Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(2);
  CHECK(hc.evaluate(0, p0, eta0) == 0.0);
  CHECK(hc.evaluate(1, p0, eta0) == 0.0);

  // linearity: E(a*x + b*y) = a*E(x) + b*E(y) for power inputs
  Eigen::MatrixXd p1(3, 2), p2(3, 2);
  p1 << 1, 2, 3, 4, 5, 6;
  p2 << 0.5, 0, 1, 0.25, 2, 1;
  Eigen::VectorXd e1(2), e2(2);
  e1 << 0.3, 0.7;
  e2 << 1.1, 0.0;
  const double lhs = hc.evaluate(0, 2.0 * p1 + 3.0 * p2, 2.0 * e1 + 3.0 * e2);
  const double rhs = 2.0 * hc.evaluate(0, p1, e1) + 3.0 * hc.evaluate(0, p2, e2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("harvest single-term value is exact") {
  // One AP, one pure-LOS user (no contamination term), gamma = 0.5, w = 1.
  ChannelStats st;
  st.ap_user = Grid<LinkStats>(1, 1);
  st.user_user = Grid<LinkStats>(1, 1);
  st.ap_ap = Grid<LinkStats>(1, 1);
  st.ap_user(0, 0) = {0.0, 1.0, 1.0, true};
  st.user_user(0, 0) = {0.0, 0.0, 0.0, false};
  st.ap_ap(0, 0) = {0.01, 0.0, 0.01, false};
  const auto pa = PilotAssignment::from_indices({0}, 1);
  const EstimationStats est = compute_estimation_stats(st, pa, 1, 1.0, 1.0);
  REQUIRE(est.gamma(0, 0) == doctest::Approx(0.5));

  const HarvestCoefficients hc = harvest_coefficients(est, st, pa, 0.5, 198.0);
  CHECK(hc.contamination[0](0, 0) == 0.0);
  Eigen::MatrixXd p(1, 1);
  p << 1.0;
  CHECK(hc.evaluate(0, p, Eigen::VectorXd::Zero(1)) == doctest::Approx(49.5));
}

TEST_CASE("self-recycling coefficient present on the diagonal") {
  ChannelStats st = small_stats(2, 2, 8);
  st.user_user(0, 0) = {0.03, 0.0, 0.03, false};
  const auto pa = PilotAssignment::from_indices({0, 1}, 2);
  const EstimationStats est = compute_estimation_stats(st, pa, 2, 0.5, 0.1);
  const HarvestCoefficients hc = harvest_coefficients(est, st, pa, 0.5, 100.0);
  CHECK(hc.from_users(0, 0) == doctest::Approx(0.5 * 100.0 * 0.03));
  CHECK(hc.from_users(0, 0) > 0.0);
}

TEST_CASE("stats matrices structure") {
  const ChannelStats st = small_stats(4, 2, 13, 0.7);
  const auto shared = PilotAssignment::from_indices({0, 0}, 1);
  const EstimationStats est = compute_estimation_stats(st, shared, 1, 0.4, 0.2);

  SUBCASE("zero residual SI kills every F entry") {
    const StatsMatrices sm =
        stats_matrices(est, st, shared, Eigen::VectorXd::Zero(4));
    for (int k = 0; k < 2; ++k) CHECK(sm.f_diag[std::size_t(k)].norm() == 0.0);
  }
  SUBCASE("cross-user C collapses under orthogonal pilots") {
    // Only the co-pilot overlap carries the extra terms; with orthogonal
    // pilots every j != k matrix reduces to gamma_k * w_j on the diagonal.
    const ChannelStats nolos = small_stats(4, 2, 14);
    const auto orth = PilotAssignment::from_indices({0, 1}, 2);
    const EstimationStats e2 = compute_estimation_stats(nolos, orth, 2, 0.4, 0.2);
    const StatsMatrices sm =
        stats_matrices(e2, nolos, orth, Eigen::VectorXd::Zero(4));
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j) {
        if (j == k) continue;
        const Eigen::MatrixXd& C = sm.c_mat(k, j);
        for (int m = 0; m < 4; ++m)
          for (int mp = 0; mp < 4; ++mp) {
            if (m == mp)
              CHECK(C(m, m) ==
                    doctest::Approx(e2.gamma(m, k) * nolos.ap_user(m, j).w));
            else
              CHECK(C(m, mp) == 0.0);
          }
      }
  }
  SUBCASE("C matrices are symmetric positive semidefinite") {
    const StatsMatrices sm =
        stats_matrices(est, st, shared, Eigen::VectorXd::Constant(4, 1e-9));
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j) {
        const Eigen::MatrixXd& C = sm.c_mat(k, j);
        CHECK((C - C.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12 * C.norm());
      }
  }
  SUBCASE("b equals the estimate variance") {
    const StatsMatrices sm =
        stats_matrices(est, st, shared, Eigen::VectorXd::Zero(4));
    for (int m = 0; m < 4; ++m)
      for (int k = 0; k < 2; ++k) {
        CHECK(sm.b(m, k).real() == doctest::Approx(est.gamma(m, k)).epsilon(1e-14));
        CHECK(sm.b(m, k).imag() == 0.0);
      }
  }
  SUBCASE("D diagonal is the noise power times the estimate variance") {
    const StatsMatrices sm =
        stats_matrices(est, st, shared, Eigen::VectorXd::Zero(4));
    for (int m = 0; m < 4; ++m)
      for (int k = 0; k < 2; ++k)
        CHECK(sm.d(m, k) == doctest::Approx(0.2 * est.gamma(m, k)));
  }
}

TEST_CASE("effective SINR") {
  const ChannelStats st = small_stats(3, 2, 23, 0.5);
  const auto pa = PilotAssignment::from_indices({0, 0}, 1);
  const EstimationStats est = compute_estimation_stats(st, pa, 1, 0.4, 0.2);
  const StatsMatrices sm =
      stats_matrices(est, st, pa, Eigen::VectorXd::Constant(3, 1e-3));

  Allocation alloc = Allocation::zeros(3, 2);
  alloc.p_dl.setConstant(0.5);
  alloc.eta_e << 0.4, 0.2;
  alloc.eta_b << 0.1, 0.3;

  SUBCASE("zero uplink power gives zero SINR") {
    Allocation a2 = alloc;
    a2.eta_e[0] = a2.eta_b[0] = 0.0;
    CHECK(effective_sinr(sm, a2, 0) == 0.0);
  }
  SUBCASE("scale invariance in the filter") {
    const double base = effective_sinr(sm, alloc, 0);
    Allocation a2 = alloc;
    a2.alpha[0] *= cplx(-2.5, 1.7);
    CHECK(effective_sinr(sm, a2, 0) == doctest::Approx(base).epsilon(1e-12));
  }
  SUBCASE("zero filter is a parameter error") {
    Allocation a2 = alloc;
    a2.alpha[1].setZero();
    CHECK_THROWS_AS(effective_sinr(sm, a2, 1), std::invalid_argument);
  }
  SUBCASE("single-AP scalar collapse") {
    const ChannelStats st1 = small_stats(1, 1, 31, 0.4);
    const auto pa1 = PilotAssignment::from_indices({0}, 1);
    const EstimationStats e1 = compute_estimation_stats(st1, pa1, 1, 0.4, 0.2);
    const StatsMatrices sm1 =
        stats_matrices(e1, st1, pa1, Eigen::VectorXd::Zero(1));
    Allocation a1 = Allocation::zeros(1, 1);
    a1.eta_e << 0.8;
    const double eta = 0.8;
    const double b = sm1.b(0, 0).real();
    const double c = sm1.c_mat(0, 0)(0, 0);
    const double expected =
        eta * b * b / (eta * (c - b * b) + 0.2 * e1.gamma(0, 0));
    CHECK(effective_sinr(sm1, a1, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("raising the residual SI never raises the SINR") {
    double prev = std::numeric_limits<double>::infinity();
    for (double rsi : {0.0, 1e-9, 1e-6, 1e-3}) {
      const StatsMatrices smx =
          stats_matrices(est, st, pa, Eigen::VectorXd::Constant(3, rsi));
      const double g = effective_sinr(smx, alloc, 0);
      CHECK(g <= prev + 1e-15);
      prev = g;
    }
  }
}

TEST_CASE("spectral efficiency and threshold") {
  CHECK(spectral_efficiency(0.0, 198, 200) == 0.0);
  CHECK(spectral_efficiency(1.0, 198, 200) == doctest::Approx(0.99));
  CHECK(sinr_threshold(0.0, 198, 200) == 0.0);
  // frozen direct evaluations of 2^(tau_c R / tau_u) - 1
  CHECK(sinr_threshold(2.5, 198, 200) == doctest::Approx(4.7567418756).epsilon(1e-9));
  CHECK(sinr_threshold(2.0, 198, 200) == doctest::Approx(3.0564058968).epsilon(1e-9));
  for (double r : {0.1, 0.7, 2.5, 3.9}) {
    CHECK(spectral_efficiency(sinr_threshold(r, 198, 200), 198, 200) ==
          doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_SUITE_END();
