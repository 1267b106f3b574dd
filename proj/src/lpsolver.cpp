#include "cfser/lpsolver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cfser {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LinearProgram LinearProgram::with_vars(int n) {
  if (n < 1) throw std::invalid_argument("LinearProgram: need at least one variable");
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.lower_bounds = Eigen::VectorXd::Zero(n);
  lp.upper_bounds = Eigen::VectorXd::Constant(n, kInf);
  lp.var_names.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) lp.var_names[j] = "x" + std::to_string(j);
  return lp;
}

void LinearProgram::add_constraint(Eigen::VectorXd coeffs, Relation rel,
                                   double rhs, std::string name) {
  if (coeffs.size() != objective.size())
    throw std::invalid_argument("add_constraint: coefficient length mismatch");
  LpConstraint c;
  c.coeffs = std::move(coeffs);
  c.rel = rel;
  c.rhs = rhs;
  c.name = name.empty() ? "r" + std::to_string(constraints.size()) : std::move(name);
  constraints.push_back(std::move(c));
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

double max_relative_violation(const LinearProgram& lp,
                              const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    const double lhs = c.coeffs.dot(x);
    const double mag = c.coeffs.cwiseAbs().dot(x.cwiseAbs());
    double viol = 0.0;
    switch (c.rel) {
      case Relation::LessEq: viol = lhs - c.rhs; break;
      case Relation::GreaterEq: viol = c.rhs - lhs; break;
      case Relation::Equal: viol = std::abs(lhs - c.rhs); break;
    }
    const double scale = std::max({1.0, std::abs(c.rhs), mag});
    worst = std::max(worst, viol / scale);
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, (lp.lower_bounds[j] - x[j]) /
                                std::max(1.0, std::abs(lp.lower_bounds[j])));
    if (std::isfinite(lp.upper_bounds[j]))
      worst = std::max(worst, (x[j] - lp.upper_bounds[j]) /
                                  std::max(1.0, std::abs(lp.upper_bounds[j])));
  }
  return worst;
}

namespace {

struct Tableau {
  // rows 0..m-1: constraints; row m: phase-2 costs; row m+1: phase-1 costs.
  // Column layout: structural | slack/surplus | artificial | rhs.
  Eigen::MatrixXd t;
  std::vector<int> basis;
  int m = 0;
  int ncols = 0;      // all variable columns (excl. rhs)
  int art_start = 0;  // first artificial column
  int iterations = 0;
  bool bland = false;
  int degenerate_streak = 0;

  double rhs(int i) const { return t(i, ncols); }

  void pivot(int r, int s) {
    t.row(r) /= t(r, s);
    for (int i = 0; i < m + 2; ++i) {
      if (i == r) continue;
      const double f = t(i, s);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = s;
    ++iterations;
  }

  // Runs the simplex loop on cost row `cost`. Columns >= entry_limit never
  // enter (bans artificials once phase 1 ends, and always keeps them from
  // re-entering). Returns false when unbounded.
  bool iterate(int cost, int entry_limit, double pivot_tol, int max_iter) {
    while (iterations < max_iter) {
      int s = -1;
      if (bland) {
        for (int j = 0; j < entry_limit; ++j)
          if (t(cost, j) < -pivot_tol) { s = j; break; }
      } else {
        double best = -pivot_tol;
        for (int j = 0; j < entry_limit; ++j)
          if (t(cost, j) < best) { best = t(cost, j); s = j; }
      }
      if (s < 0) return true;  // optimal for this phase

      int r = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = t(i, s);
        if (a <= pivot_tol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (r < 0 || basis[std::size_t(i)] < basis[std::size_t(r)]))) {
          best_ratio = ratio;
          r = i;
        }
      }
      if (r < 0) return false;  // unbounded direction

      const double before = t(cost, ncols);
      pivot(r, s);
      if (t(cost, ncols) - before < 1e-12 * (1.0 + std::abs(before))) {
        if (++degenerate_streak > 2 * (m + ncols)) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
    return true;  // caller checks the iteration budget
  }
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const LpOptions& options) {
  const int n = lp.num_vars();
  if (n < 1) throw std::invalid_argument("solve: LP has no variables");
  if (lp.lower_bounds.size() != n || lp.upper_bounds.size() != n)
    throw std::invalid_argument("solve: bound vectors must match variable count");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower_bounds[j]))
      throw std::invalid_argument("solve: lower bounds must be finite");
    if (lp.lower_bounds[j] > lp.upper_bounds[j])
      throw std::invalid_argument("solve: lower bound exceeds upper bound");
  }
  for (const auto& c : lp.constraints)
    if (c.coeffs.size() != n)
      throw std::invalid_argument("solve: constraint dimension mismatch");

  // Shift to y = x - l >= 0 and turn finite upper bounds into rows.
  struct Row {
    Eigen::VectorXd a;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + std::size_t(n));
  for (const auto& c : lp.constraints)
    rows.push_back({c.coeffs, c.rel, c.rhs - c.coeffs.dot(lp.lower_bounds)});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper_bounds[j])) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[j] = 1.0;
      rows.push_back({std::move(e), Relation::LessEq,
                      lp.upper_bounds[j] - lp.lower_bounds[j]});
    }
  }
  const int m = static_cast<int>(rows.size());

  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.a = -r.a;
      r.rhs = -r.rhs;
      if (r.rel == Relation::LessEq) r.rel = Relation::GreaterEq;
      else if (r.rel == Relation::GreaterEq) r.rel = Relation::LessEq;
    }
  }

  // Equilibrate rows and columns to unit max-norm; the harvest rows mix
  // coefficients across ~12 orders of magnitude otherwise.
  Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n);
  for (int pass = 0; pass < 3; ++pass) {
    for (auto& r : rows) {
      const double mx = r.a.cwiseAbs().maxCoeff();
      if (mx > 0.0) {
        r.a /= mx;
        r.rhs /= mx;
      }
    }
    for (int j = 0; j < n; ++j) {
      double mx = 0.0;
      for (const auto& r : rows) mx = std::max(mx, std::abs(r.a[j]));
      if (mx > 0.0) {
        for (auto& r : rows) r.a[j] /= mx;
        col_scale[j] *= mx;
      }
    }
  }
  // Solving in z with y_j = z_j / col_scale_j.
  Eigen::VectorXd c_scaled(n);
  for (int j = 0; j < n; ++j) c_scaled[j] = lp.objective[j] / col_scale[j];
  const double obj_norm = c_scaled.cwiseAbs().maxCoeff();
  if (obj_norm > 0.0) c_scaled /= obj_norm;

  int n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;  // slack or surplus
    if (r.rel != Relation::LessEq) ++n_art;
  }
  Tableau tab;
  tab.m = m;
  tab.ncols = n + n_slack + n_art;
  tab.art_start = n + n_slack;
  tab.t = Eigen::MatrixXd::Zero(m + 2, tab.ncols + 1);
  tab.basis.resize(static_cast<std::size_t>(m));

  int slack = n, art = tab.art_start;
  for (int i = 0; i < m; ++i) {
    tab.t.block(i, 0, 1, n) = rows[std::size_t(i)].a.transpose();
    tab.t(i, tab.ncols) = rows[std::size_t(i)].rhs;
    switch (rows[std::size_t(i)].rel) {
      case Relation::LessEq:
        tab.t(i, slack) = 1.0;
        tab.basis[std::size_t(i)] = slack++;
        break;
      case Relation::GreaterEq:
        tab.t(i, slack++) = -1.0;
        tab.t(i, art) = 1.0;
        tab.basis[std::size_t(i)] = art++;
        break;
      case Relation::Equal:
        tab.t(i, art) = 1.0;
        tab.basis[std::size_t(i)] = art++;
        break;
    }
  }
  // Phase-2 cost row (artificials excluded from pricing later).
  tab.t.block(m, 0, 1, n) = c_scaled.transpose();
  // Phase-1 cost row: sum of artificials, reduced against the initial basis.
  for (int j = tab.art_start; j < tab.ncols; ++j) tab.t(m + 1, j) = 1.0;
  for (int i = 0; i < m; ++i)
    if (tab.basis[std::size_t(i)] >= tab.art_start)
      tab.t.row(m + 1) -= tab.t.row(i);

  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations
                                 : 400 + 60 * (m + tab.ncols);

  LpSolution sol;
  if (n_art > 0) {
    tab.iterate(m + 1, tab.art_start, options.pivot_tol, max_iter);
    if (tab.iterations >= max_iter) {
      sol.status = LpStatus::IterationLimit;
      sol.iterations = tab.iterations;
      return sol;
    }
    const double phase1 = -tab.t(m + 1, tab.ncols);
    if (phase1 > std::max(options.feas_tol, 10.0 * options.pivot_tol)) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = tab.iterations;
      return sol;
    }
    // Drive leftover basic artificials out where possible; rows without any
    // eligible pivot element are redundant and stay inert (artificials are
    // banned from entering, so their rows can never change again).
    for (int i = 0; i < m; ++i) {
      if (tab.basis[std::size_t(i)] < tab.art_start) continue;
      for (int j = 0; j < tab.art_start; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-7) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  tab.bland = false;
  tab.degenerate_streak = 0;
  const bool bounded =
      tab.iterate(m, tab.art_start, options.pivot_tol, max_iter);
  sol.iterations = tab.iterations;
  if (tab.iterations >= max_iter) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  if (!bounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[std::size_t(i)];
    if (b < n) z[b] = std::max(0.0, tab.rhs(i));
  }
  sol.x = lp.lower_bounds + z.cwiseQuotient(col_scale);
  sol.objective_value = lp.objective.dot(sol.x);
  sol.max_rel_violation = max_relative_violation(lp, sol.x);
  sol.status = sol.max_rel_violation <= options.feas_tol * 100.0
                   ? LpStatus::Optimal
                   : LpStatus::IterationLimit;
  return sol;
}

void dump(const LinearProgram& lp, std::ostream& os) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  auto row = [&](const Eigen::VectorXd& a) {
    std::string s;
    bool first = true;
    for (int j = 0; j < a.size(); ++j) {
      if (a[j] == 0.0) continue;
      if (!first) s += " + ";
      s += num(a[j]) + "*" + lp.var_names[std::size_t(j)];
      first = false;
    }
    return first ? std::string("0") : s;
  };

  os << "minimize: " << row(lp.objective) << "\n";
  os << "subject to:\n";
  for (const auto& c : lp.constraints) {
    const char* rel = c.rel == Relation::LessEq ? "<="
                      : c.rel == Relation::GreaterEq ? ">=" : "==";
    os << "  " << c.name << ": " << row(c.coeffs) << " " << rel << " "
       << num(c.rhs) << "\n";
  }
  os << "bounds:\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    os << "  " << num(lp.lower_bounds[j]) << " <= " << lp.var_names[std::size_t(j)];
    if (std::isfinite(lp.upper_bounds[j])) os << " <= " << num(lp.upper_bounds[j]);
    os << "\n";
  }
}

}  // namespace cfser
