#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cfser/common.hpp"
#include "cfser/lpsolver.hpp"
#include "lp_oracle.hpp"

using namespace cfser;

TEST_SUITE_BEGIN("lpsolver");

TEST_CASE("one-variable LP") {
  LinearProgram lp = LinearProgram::with_vars(1);
  lp.objective << 1.0;
  lp.add_constraint((Eigen::VectorXd(1) << 1.0).finished(), Relation::GreaterEq,
                    3.0, "xmin");
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.objective_value == doctest::Approx(3.0));
  CHECK(sol.max_rel_violation <= 1e-8);
}

TEST_CASE("contradictory bounds are infeasible") {
  LinearProgram lp = LinearProgram::with_vars(1);
  lp.add_constraint((Eigen::VectorXd(1) << 1.0).finished(), Relation::LessEq,
                    -1.0, "xneg");
  CHECK(solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded detection") {
  LinearProgram lp = LinearProgram::with_vars(2);
  lp.objective << -1.0, 0.0;
  lp.add_constraint((Eigen::VectorXd(2) << 0.0, 1.0).finished(),
                    Relation::LessEq, 5.0, "cap");
  CHECK(solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("equality constraints and shifted lower bounds") {
  LinearProgram lp = LinearProgram::with_vars(2);
  lp.objective << 1.0, 2.0;
  lp.lower_bounds << 1.0, -2.0;
  lp.add_constraint((Eigen::VectorXd(2) << 1.0, 1.0).finished(),
                    Relation::Equal, 4.0, "sum");
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  // minimize x + 2y on x + y = 4, x >= 1, y >= -2  ->  x = 6, y = -2
  CHECK(sol.x[0] == doctest::Approx(6.0));
  CHECK(sol.x[1] == doctest::Approx(-2.0));
  CHECK(sol.objective_value == doctest::Approx(2.0));
}

TEST_CASE("badly scaled rows are handled") {
  // Coefficients spanning 12 orders of magnitude, as in the harvest rows.
  LinearProgram lp = LinearProgram::with_vars(2);
  lp.objective << 1e-12, 1.0;
  lp.add_constraint((Eigen::VectorXd(2) << 1e-12, 1e-2).finished(),
                    Relation::GreaterEq, 3e-10, "mixed");
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  // cheapest unit of constraint satisfaction comes from x0
  CHECK(sol.x[0] == doctest::Approx(300.0).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(0.0));
  CHECK(sol.max_rel_violation <= 1e-8);
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
  Rng rng(2024);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + int(rng.next_u64() % 6);
    const int m = 1 + int(rng.next_u64() % 8);
    LinearProgram lp = LinearProgram::with_vars(n);
    for (int j = 0; j < n; ++j) {
      lp.objective[j] = rng.uniform(-1.0, 1.0);
      lp.upper_bounds[j] = 10.0;  // keeps every instance bounded
    }
    // Anchor point keeps most instances feasible; leave some random.
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, 5.0);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd a(n);
      for (int j = 0; j < n; ++j) a[j] = rng.uniform(-2.0, 2.0);
      const bool anchored = rng.uniform() < 0.7;
      const bool ge = rng.uniform() < 0.4;
      double rhs;
      if (anchored)
        rhs = a.dot(x0) + (ge ? -1.0 : 1.0) * rng.uniform(0.1, 2.0);
      else
        rhs = rng.uniform(-4.0, 4.0);
      lp.add_constraint(std::move(a), ge ? Relation::GreaterEq : Relation::LessEq,
                        rhs);
    }

    const lp_oracle::Result oracle = lp_oracle::enumerate_vertices(lp);
    const LpSolution sol = solve(lp);
    if (oracle.feasible) {
      REQUIRE(sol.status == LpStatus::Optimal);
      CHECK(std::abs(sol.objective_value - oracle.objective) <=
            1e-6 * std::max({1.0, std::abs(sol.objective_value),
                             std::abs(oracle.objective)}));
      CHECK(sol.max_rel_violation <= 1e-8);
      ++solved;
    } else {
      CHECK(sol.status == LpStatus::Infeasible);
      ++infeasible;
    }
  }
  // the generator must exercise both outcomes
  CHECK(solved >= 30);
  CHECK(infeasible >= 3);
}

TEST_CASE("deterministic pivoting") {
  LinearProgram lp = LinearProgram::with_vars(4);
  lp.objective << -1.0, -1.0, -1.0, -1.0;
  Rng rng(5);
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd a(4);
    for (int j = 0; j < 4; ++j) a[j] = rng.uniform(0.1, 2.0);
    lp.add_constraint(std::move(a), Relation::LessEq, rng.uniform(1.0, 3.0));
  }
  const LpSolution s1 = solve(lp);
  const LpSolution s2 = solve(lp);
  REQUIRE(s1.status == LpStatus::Optimal);
  CHECK(s1.x == s2.x);
  CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("dimension mismatch is a parameter error") {
  LinearProgram lp = LinearProgram::with_vars(3);
  CHECK_THROWS_AS(
      lp.add_constraint(Eigen::VectorXd::Ones(2), Relation::LessEq, 1.0),
      std::invalid_argument);
}

TEST_CASE("text dump lists every constraint") {
  LinearProgram lp = LinearProgram::with_vars(2);
  lp.objective << 1.0, 0.0;
  lp.add_constraint((Eigen::VectorXd(2) << 1.0, -2.0).finished(),
                    Relation::GreaterEq, 0.5, "demo");
  std::ostringstream os;
  dump(lp, os);
  const std::string text = os.str();
  CHECK(text.find("minimize") != std::string::npos);
  CHECK(text.find("demo:") != std::string::npos);
  CHECK(text.find(">= 0.5") != std::string::npos);
}

TEST_SUITE_END();
