#ifndef POLYINV_LINPROG_HPP
#define POLYINV_LINPROG_HPP

#include <Eigen/Dense>

#include "polyinv/tolerances.hpp"

namespace polyinv {

enum class LPStatus { Optimal, Infeasible, Unbounded };

enum class LPSense { Minimize, Maximize };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Eigen::VectorXd point;  // valid when status == Optimal
  double objective = 0.0;
};

/// Solves  min/max  objective . x  subject to  C x <= d  over free x.
///
/// Dense two-phase tableau simplex. Free variables are split into positive
/// and negative parts; Dantzig pricing with a Bland fallback once the
/// iteration count suggests cycling. Rows are normalized internally, so the
/// feasibility tolerance `tol.lp` is geometric.
LPResult solve_lp(const Eigen::VectorXd& objective, const Eigen::MatrixXd& C,
                  const Eigen::VectorXd& d, LPSense sense,
                  const Tolerances& tol = Tolerances{});

/// Phase-1 feasibility of C x <= d.
bool lp_feasible(const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                 const Tolerances& tol = Tolerances{});

}  // namespace polyinv

#endif
