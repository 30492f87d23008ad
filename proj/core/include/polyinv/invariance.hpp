#ifndef POLYINV_INVARIANCE_HPP
#define POLYINV_INVARIANCE_HPP

#include <vector>

#include "polyinv/geometry.hpp"
#include "polyinv/network.hpp"
#include "polyinv/segmentation.hpp"
#include "polyinv/tolerances.hpp"

namespace polyinv {

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  void validate() const;
};

/// Closed-loop dynamics inside one region: x' = A_cl x + b_cl with
/// A_cl = A + B E^(L), b_cl = B G^(L).
struct ClosedLoopPiece {
  Eigen::MatrixXd A_cl;
  Eigen::VectorXd b_cl;
  int region = -1;
};

enum class PieceKind { Outer, Obstacle };

/// One D_ij: a face of the safe set (or of an obstacle closure) intersected
/// with one linear region. Outer pieces need normal.f <= 0 at each vertex,
/// obstacle pieces need normal.f >= 0.
struct BoundaryPiece {
  PieceKind kind = PieceKind::Outer;
  int obstacle = -1;  // index when kind == Obstacle
  int face_row = -1;  // row into the minimal representation of the owning set
  int region = -1;    // region id
  HPolytope geometry;
  std::vector<Eigen::VectorXd> verts;
  Eigen::VectorXd normal;  // the face row as given, unnormalized
};

struct Violation {
  PieceKind kind = PieceKind::Outer;
  int obstacle = -1;
  int face_row = -1;
  int region = -1;
  Eigen::VectorXd vertex;
  double margin = 0.0;
};

struct VerdictStats {
  int region_count = 0;
  int piece_count = 0;
  int vertex_count = 0;
  int marginal_count = 0;
  double segment_seconds = 0.0;
  double pieces_seconds = 0.0;
  double check_seconds = 0.0;
};

struct Verdict {
  bool safe = true;
  std::vector<Violation> violations;
  std::vector<Violation> marginal;  // tangential within the tolerance band
  VerdictStats stats;
};

struct VerifyOptions {
  bool prune = true;
  bool early_exit = false;
  int threads = 1;
  int probes_per_face = 64;  // Monte-Carlo coverage probe on each face
  unsigned probe_seed = 0;
  Tolerances tol;
};

ClosedLoopPiece closed_loop_piece(const LinearSystem& sys,
                                  const LinearRegion& region);

/// All nonempty face-region intersections of the safe set and the obstacle
/// closures. Throws CoverageGap when a probe point on some face belongs to
/// no region.
std::vector<BoundaryPiece> boundary_pieces(
    const HPolytope& S, const std::vector<HPolytope>& obstacles,
    const std::vector<LinearRegion>& regions,
    const VerifyOptions& opts = VerifyOptions{});

/// Margin normal.(A_cl v + b_cl) for every vertex of the piece.
std::vector<std::pair<Eigen::VectorXd, double>> check_piece(
    const BoundaryPiece& piece, const ClosedLoopPiece& dynamics);

/// Piece assembly and vertex checks over precomputed regions; fills every
/// stat except the segmentation time.
Verdict check_regions(const LinearSystem& sys, const HPolytope& S,
                      const std::vector<HPolytope>& obstacles,
                      const std::vector<LinearRegion>& regions,
                      const VerifyOptions& opts = VerifyOptions{});

/// Full pipeline: segmentation, piece assembly, vertex checks.
Verdict verify(const LinearSystem& sys, const Network& net, const HPolytope& S,
               const std::vector<HPolytope>& obstacles,
               const VerifyOptions& opts = VerifyOptions{});

}  // namespace polyinv

#endif
