#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace cfser {

enum class Relation { LessEq, GreaterEq, Equal };

struct LpConstraint {
  Eigen::VectorXd coeffs;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
  std::string name;
};

/// Dense LP: minimize objective . x subject to the constraint rows and the
/// per-variable bounds. Lower bounds must be finite (default 0); finite upper
/// bounds are handled as extra rows internally.
struct LinearProgram {
  Eigen::VectorXd objective;
  std::vector<LpConstraint> constraints;
  Eigen::VectorXd lower_bounds;
  Eigen::VectorXd upper_bounds;
  std::vector<std::string> var_names;

  static LinearProgram with_vars(int n);
  int num_vars() const { return static_cast<int>(objective.size()); }
  void add_constraint(Eigen::VectorXd coeffs, Relation rel, double rhs,
                      std::string name = {});
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;
  double objective_value = 0.0;
  int iterations = 0;
  // Result of the final recheck of the returned point against the original
  // (unscaled) constraints; see max_relative_violation.
  double max_rel_violation = 0.0;
};

struct LpOptions {
  double feas_tol = 1e-8;   // feasibility tolerance, relative
  double pivot_tol = 1e-9;  // reduced-cost / pivot threshold on scaled data
  int max_iterations = 0;   // 0 = automatic from problem size
};

/// Two-phase primal simplex on an equilibrated dense tableau. Dantzig pricing
/// with a switch to Bland's rule after a long degenerate streak.
LpSolution solve(const LinearProgram& lp, const LpOptions& options = {});

/// Independent feasibility check: walks constraints and bounds directly,
/// measuring each violation relative to max(1, |rhs|, sum_j |a_ij x_j|).
double max_relative_violation(const LinearProgram& lp,
                              const Eigen::VectorXd& x);

/// Text dump, one row per constraint.
void dump(const LinearProgram& lp, std::ostream& os);

}  // namespace cfser
