#ifndef POLYINV_GEOMETRY_HPP
#define POLYINV_GEOMETRY_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "polyinv/linprog.hpp"
#include "polyinv/tolerances.hpp"

namespace polyinv {

/// Halfspace representation {x | C x <= d}. Immutable by convention: every
/// operation returns a new value, so instances can be shared across threads.
struct HPolytope {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  bool open = false;  // obstacles carry strict inequalities; geometry acts on the closure

  HPolytope() = default;
  HPolytope(Eigen::MatrixXd C_, Eigen::VectorXd d_);

  int dim() const { return static_cast<int>(C.cols()); }
  int rows() const { return static_cast<int>(C.rows()); }

  /// Axis-aligned box lo <= x <= hi.
  static HPolytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static HPolytope cube(int dim, double lo, double hi);
};

struct VPolytope {
  std::vector<Eigen::VectorXd> vertices;
};

/// One facet F_i = P ∩ {C_i x = d_i}, carried as a polytope of its own.
struct Face {
  HPolytope parent;
  int row_index = -1;
  HPolytope geometry;
};

LPResult solve_lp(const Eigen::VectorXd& objective, const HPolytope& P,
                  LPSense sense, const Tolerances& tol = Tolerances{});

/// Center and radius of the largest inscribed ball, from a single LP with
/// rows C_i x + |C_i| r <= d_i. Throws EmptyPolytope / UnboundedPolytope.
std::pair<Eigen::VectorXd, double> chebyshev_center(
    const HPolytope& P, const Tolerances& tol = Tolerances{});

bool is_empty(const HPolytope& P, const Tolerances& tol = Tolerances{});

bool contains(const HPolytope& P, const Eigen::VectorXd& x, double tol);

/// Row-wise concatenation; the result is exactly P ∩ Q.
HPolytope intersect(const HPolytope& P, const HPolytope& Q);

HPolytope intersect_halfspace(const HPolytope& P, const Eigen::VectorXd& a,
                              double b, bool greater_equal = false);

/// Componentwise (lo, hi) of P. Throws UnboundedPolytope, EmptyPolytope.
std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(
    const HPolytope& P, const Tolerances& tol = Tolerances{});

/// Exact vertex set of a bounded polytope. Lower-dimensional inputs (faces)
/// are fine. Active-set enumeration in dimension <= 4, incremental halfspace
/// cutting above.
VPolytope vertices(const HPolytope& P, const Tolerances& tol = Tolerances{});

/// One Face per row. P should be in minimal representation.
std::vector<Face> faces(const HPolytope& P);

/// Drops every row whose removal leaves the point set unchanged, certified
/// row by row with an LP.
HPolytope remove_redundant(const HPolytope& P,
                           const Tolerances& tol = Tolerances{});

// ---------------------------------------------------------------------------
// Vertex-tracked cells.
//
// Segmentation slices one polytope with many hyperplanes. Carrying the
// vertex set (plus, per vertex, the indices of tight rows) through each cut
// turns the inner loop into pure linear algebra; the LP is needed only for
// the occasional degeneracy decision.

struct CutCell {
  Eigen::MatrixXd C;  // rows normalized to unit norm
  Eigen::VectorXd d;
  std::vector<Eigen::VectorXd> verts;
  std::vector<std::vector<int>> tight;  // sorted row indices per vertex

  int dim() const { return static_cast<int>(C.cols()); }
  HPolytope polytope() const { return HPolytope(C, d); }
  Eigen::VectorXd centroid() const;
  std::pair<Eigen::VectorXd, Eigen::VectorXd> bbox() const;
};

/// Builds a cell from a bounded polytope (rows normalized, vertices
/// enumerated, tight sets computed).
CutCell make_cell(const HPolytope& P, const Tolerances& tol = Tolerances{});

enum class CutOutcome { Split, AllBelow, AllAbove };

struct CutResult {
  CutOutcome outcome;
  std::optional<CutCell> below;  // a.x <= b side
  std::optional<CutCell> above;  // a.x >= b side
};

/// Cuts a cell with hyperplane a.x = b. When the plane misses the cell the
/// original cell is reported on its side without an extra row. Vertices
/// within tol.face of the plane belong to both children.
CutResult cut_cell(const CutCell& cell, const Eigen::VectorXd& a, double b,
                   const Tolerances& tol = Tolerances{});

/// Keeps the part of `cell` on the given side of a.x = b, appending the row.
/// Returns nullopt when that side is empty.
std::optional<CutCell> clip_cell(const CutCell& cell, const Eigen::VectorXd& a,
                                 double b, bool greater_equal,
                                 const Tolerances& tol = Tolerances{});

/// Restriction of `cell` to the plane a.x = b (both inequality senses
/// appended). Lower-dimensional result; nullopt when the plane misses.
std::optional<CutCell> slice_cell(const CutCell& cell, const Eigen::VectorXd& a,
                                  double b, const Tolerances& tol = Tolerances{});

/// Chebyshev radius of a cell, bounded cheaply through the vertex set and
/// decided by LP only inside the ambiguous band around `tol.radius`.
bool cell_is_degenerate(const CutCell& cell, const Tolerances& tol = Tolerances{});

}  // namespace polyinv

#endif
