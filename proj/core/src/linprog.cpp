#include "polyinv/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "polyinv/errors.hpp"

namespace polyinv {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-10;
constexpr double kZeroRowTol = 1e-13;

// Full-tableau simplex state over  T x = b,  x >= 0,  with basis indices.
struct Tableau {
  Eigen::MatrixXd T;
  Eigen::VectorXd b;
  std::vector<int> basis;

  void pivot(int row, int col) {
    const double piv = T(row, col);
    T.row(row) /= piv;
    b(row) /= piv;
    T(row, col) = 1.0;  // kill roundoff on the pivot itself
    for (int i = 0; i < T.rows(); ++i) {
      if (i == row) continue;
      double factor = T(i, col);
      if (factor == 0.0) continue;
      T.row(i) -= factor * T.row(row);
      b(i) -= factor * b(row);
      T(i, col) = 0.0;
    }
    basis[row] = col;
  }
};

enum class PhaseOutcome { Optimal, Unbounded, Stalled };

// Minimizes cost over the tableau in place. `allowed(j)` masks columns that
// may enter the basis.
PhaseOutcome run_simplex(Tableau& tab, Eigen::VectorXd& reduced,
                         double& objective, const std::vector<bool>& allowed) {
  const int m = static_cast<int>(tab.T.rows());
  const int ncols = static_cast<int>(tab.T.cols());
  const long bland_after = 20L * (m + ncols) + 200;
  const long max_iter = 400L * (m + ncols) + 20000;

  for (long iter = 0; iter < max_iter; ++iter) {
    const bool bland = iter >= bland_after;
    int enter = -1;
    double best = -kReducedCostTol;
    for (int j = 0; j < ncols; ++j) {
      if (!allowed[j]) continue;
      if (reduced(j) < best) {
        enter = j;
        if (bland) break;  // first eligible index
        best = reduced(j);
      }
    }
    if (enter < 0) return PhaseOutcome::Optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double a = tab.T(i, enter);
      if (a <= kPivotTol) continue;
      double ratio = tab.b(i) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 &&
           (leave < 0 || tab.basis[i] < tab.basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return PhaseOutcome::Unbounded;

    tab.pivot(leave, enter);
    double factor = reduced(enter);
    reduced -= factor * tab.T.row(leave).transpose();
    reduced(enter) = 0.0;
    objective += factor * tab.b(leave);
  }
  return PhaseOutcome::Stalled;
}

}  // namespace

LPResult solve_lp(const Eigen::VectorXd& objective, const Eigen::MatrixXd& C,
                  const Eigen::VectorXd& d, LPSense sense,
                  const Tolerances& tol) {
  const int n = static_cast<int>(objective.size());
  if (C.rows() != d.size() || (C.rows() > 0 && C.cols() != n)) {
    throw DimensionMismatch("solve_lp: C is " + std::to_string(C.rows()) +
                            "x" + std::to_string(C.cols()) + ", d has " +
                            std::to_string(d.size()) + ", objective has " +
                            std::to_string(objective.size()));
  }

  Eigen::VectorXd c =
      sense == LPSense::Maximize ? Eigen::VectorXd(-objective) : objective;

  // Normalize rows; zero rows are either vacuous or contradictory.
  std::vector<int> keep;
  for (int i = 0; i < C.rows(); ++i) {
    double norm = C.row(i).norm();
    if (norm < kZeroRowTol) {
      if (d(i) < -tol.lp) return {LPStatus::Infeasible, {}, 0.0};
      continue;
    }
    keep.push_back(i);
  }
  const int m = static_cast<int>(keep.size());

  if (m == 0) {
    if (c.size() == 0 || c.lpNorm<Eigen::Infinity>() < kZeroRowTol) {
      return {LPStatus::Optimal, Eigen::VectorXd::Zero(n), 0.0};
    }
    LPResult r;
    r.status = LPStatus::Unbounded;
    r.point = Eigen::VectorXd::Zero(n);
    r.objective = sense == LPSense::Maximize
                      ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    return r;
  }

  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    double norm = C.row(keep[i]).norm();
    A.row(i) = C.row(keep[i]) / norm;
    rhs(i) = d(keep[i]) / norm;
  }

  // Standard form over x+, x-, slacks: A x+ - A x- + s = rhs. Rows with a
  // negative rhs are negated, which turns their slack coefficient to -1 and
  // requires an artificial variable for the initial basis.
  const int n_slack = m;
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i) {
    if (rhs(i) < 0) {
      A.row(i) = -A.row(i);
      rhs(i) = -rhs(i);
      art_rows.push_back(i);
    }
  }
  const int n_art = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + n_slack + n_art;

  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m, ncols);
  tab.b = rhs;
  tab.basis.assign(m, -1);
  tab.T.block(0, 0, m, n) = A;
  tab.T.block(0, n, m, n) = -A;
  {
    int art = 0;
    std::vector<bool> negated(m, false);
    for (int r : art_rows) negated[r] = true;
    for (int i = 0; i < m; ++i) {
      tab.T(i, 2 * n + i) = negated[i] ? -1.0 : 1.0;
      if (negated[i]) {
        tab.T(i, 2 * n + n_slack + art) = 1.0;
        tab.basis[i] = 2 * n + n_slack + art;
        ++art;
      } else {
        tab.basis[i] = 2 * n + i;
      }
    }
  }

  std::vector<bool> allowed(ncols, true);

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    Eigen::VectorXd reduced = Eigen::VectorXd::Zero(ncols);
    double w = 0.0;
    // cost = sum of artificials; express it through the starting basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= 2 * n + n_slack) {
        reduced -= tab.T.row(i).transpose();
        w += tab.b(i);
      }
    }
    for (int j = 2 * n + n_slack; j < ncols; ++j) reduced(j) += 1.0;

    PhaseOutcome out = run_simplex(tab, reduced, w, allowed);
    if (out == PhaseOutcome::Stalled) throw Error("solve_lp: phase 1 stalled");
    if (w > std::max(tol.lp, 1e-9) * 10) {
      return {LPStatus::Infeasible, {}, 0.0};
    }

    // Pivot leftover artificials out of the basis; a row that cannot be
    // pivoted is linearly dependent and gets dropped.
    std::vector<int> drop;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < 2 * n + n_slack) continue;
      int col = -1;
      for (int j = 0; j < 2 * n + n_slack; ++j) {
        if (std::abs(tab.T(i, j)) > 1e-8) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        drop.push_back(i);
      }
    }
    if (!drop.empty()) {
      std::vector<int> rows;
      for (int i = 0; i < m; ++i) {
        if (std::find(drop.begin(), drop.end(), i) == drop.end())
          rows.push_back(i);
      }
      Eigen::MatrixXd T2(rows.size(), ncols);
      Eigen::VectorXd b2(rows.size());
      std::vector<int> basis2;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        T2.row(k) = tab.T.row(rows[k]);
        b2(k) = tab.b(rows[k]);
        basis2.push_back(tab.basis[rows[k]]);
      }
      tab.T = std::move(T2);
      tab.b = std::move(b2);
      tab.basis = std::move(basis2);
    }
    for (int j = 2 * n + n_slack; j < ncols; ++j) allowed[j] = false;
  }

  // Phase 2 on the original cost.
  const int m2 = static_cast<int>(tab.T.rows());
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  cost.head(n) = c;
  cost.segment(n, n) = -c;
  Eigen::VectorXd reduced = cost;
  double z = 0.0;
  for (int i = 0; i < m2; ++i) {
    double cb = cost(tab.basis[i]);
    if (cb == 0.0) continue;
    reduced -= cb * tab.T.row(i).transpose();
    z += cb * tab.b(i);
  }
  for (int i = 0; i < m2; ++i) reduced(tab.basis[i]) = 0.0;

  PhaseOutcome out = run_simplex(tab, reduced, z, allowed);
  if (out == PhaseOutcome::Stalled) throw Error("solve_lp: phase 2 stalled");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m2; ++i) {
    int j = tab.basis[i];
    if (j < n)
      x(j) += tab.b(i);
    else if (j < 2 * n)
      x(j - n) -= tab.b(i);
  }

  LPResult result;
  result.point = x;
  if (out == PhaseOutcome::Unbounded) {
    result.status = LPStatus::Unbounded;
    result.objective = sense == LPSense::Maximize
                           ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
  } else {
    result.status = LPStatus::Optimal;
    double value = objective.size() == 0 ? 0.0 : objective.dot(x);
    result.objective = value;
  }
  return result;
}

bool lp_feasible(const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                 const Tolerances& tol) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(C.cols());
  LPResult r = solve_lp(zero, C, d, LPSense::Minimize, tol);
  return r.status == LPStatus::Optimal;
}

}  // namespace polyinv

