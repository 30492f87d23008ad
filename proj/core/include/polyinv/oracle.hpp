#ifndef POLYINV_ORACLE_HPP
#define POLYINV_ORACLE_HPP

#include <optional>
#include <vector>

#include "polyinv/geometry.hpp"
#include "polyinv/invariance.hpp"
#include "polyinv/network.hpp"
#include "polyinv/segmentation.hpp"

namespace polyinv {

// Ground-truth machinery for testing: deliberately slow and simple, kept
// independent of the segmentation path it cross-checks.

enum class ExitKind { None, LeftSafeSet, EnteredObstacle };

struct ExitEvent {
  ExitKind kind = ExitKind::None;
  double time = 0.0;  // linearly interpolated crossing time
  int face_row = -1;     // for LeftSafeSet
  int obstacle = -1;     // for EnteredObstacle
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  ExitEvent exit_event;
};

/// Enumerates activation patterns layer by layer, stacking the delimiter
/// inequalities of each segment choice and discarding infeasible or
/// degenerate prefixes by LP. Refuses networks with more than 24 breakpoint
/// hyperplanes (ScaleGuard).
std::vector<LinearRegion> enumerate_regions_bruteforce(
    const Network& net, const HPolytope& S,
    const Tolerances& tol = Tolerances{});

struct SimulateOptions {
  double event_tol = 1e-9;  // geometric depth a crossing must exceed
};

/// Fixed-step fourth-order Runge-Kutta integration of
/// x' = A x + B N(x), recording the first exit from S or entry into an
/// obstacle interior. Throws NonFinite past 1e12.
Trajectory simulate(const LinearSystem& sys, const Network& net,
                    const Eigen::VectorXd& x0, double horizon, double step,
                    const HPolytope& S, const std::vector<HPolytope>& obstacles,
                    const SimulateOptions& sim_opts = SimulateOptions{});

struct FalsifyOptions {
  int n_samples = 1000;
  double horizon = 10.0;
  double step = 1e-3;
  unsigned seed = 0;
  int threads = 1;
  double event_tol = 1e-9;
  Tolerances tol;
};

/// Samples initial states on the border of S, on obstacle borders and at
/// every boundary-piece vertex; returns the first trajectory that escapes,
/// or nullopt. Deterministic for a fixed seed regardless of thread count.
std::optional<Trajectory> falsify(const LinearSystem& sys, const Network& net,
                                  const HPolytope& S,
                                  const std::vector<HPolytope>& obstacles,
                                  const FalsifyOptions& opts = FalsifyOptions{});

}  // namespace polyinv

#endif
