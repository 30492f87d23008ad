#include "polyinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyinv/errors.hpp"

namespace polyinv {

namespace {

constexpr double kZeroRowTol = 1e-13;

std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// Exact adjacency test: two vertices share an edge iff their common tight
// rows span a subspace of dimension n-1.
bool adjacent(const Eigen::MatrixXd& C, const std::vector<int>& common,
              int n) {
  if (static_cast<int>(common.size()) < n - 1) return false;
  if (n == 1) return true;
  Eigen::MatrixXd M(common.size(), n);
  for (std::size_t k = 0; k < common.size(); ++k) M.row(k) = C.row(common[k]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-9);
  return qr.rank() == n - 1;
}

struct Classified {
  std::vector<int> in, out, on;
  Eigen::VectorXd vals;
};

Classified classify(const CutCell& cell, const Eigen::VectorXd& an, double bn,
                    double band) {
  Classified c;
  c.vals.resize(cell.verts.size());
  for (std::size_t i = 0; i < cell.verts.size(); ++i) {
    double v = an.dot(cell.verts[i]) - bn;
    c.vals(i) = v;
    if (v > band)
      c.out.push_back(static_cast<int>(i));
    else if (v < -band)
      c.in.push_back(static_cast<int>(i));
    else
      c.on.push_back(static_cast<int>(i));
  }
  return c;
}

struct NewVertex {
  Eigen::VectorXd point;
  std::vector<int> tight;  // without the cut-row index
};

std::vector<NewVertex> edge_crossings(const CutCell& cell,
                                      const Classified& cls) {
  const int n = cell.dim();
  std::vector<NewVertex> crossings;
  for (int i : cls.in) {
    for (int j : cls.out) {
      std::vector<int> common = intersect_sorted(cell.tight[i], cell.tight[j]);
      if (!adjacent(cell.C, common, n)) continue;
      double t = -cls.vals(i) / (cls.vals(j) - cls.vals(i));
      NewVertex nv;
      nv.point = cell.verts[i] + t * (cell.verts[j] - cell.verts[i]);
      nv.tight = std::move(common);
      crossings.push_back(std::move(nv));
    }
  }
  return crossings;
}

double point_scale(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 + std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
}

// Appends `point` to the cell unless a vertex within eps already exists, in
// which case the tight sets are merged.
void add_or_merge(CutCell& cell, const Eigen::VectorXd& point,
                  std::vector<int> tight, double eps) {
  for (std::size_t i = 0; i < cell.verts.size(); ++i) {
    if ((cell.verts[i] - point).lpNorm<Eigen::Infinity>() <= eps) {
      std::vector<int> merged;
      std::set_union(cell.tight[i].begin(), cell.tight[i].end(), tight.begin(),
                     tight.end(), std::back_inserter(merged));
      cell.tight[i] = std::move(merged);
      return;
    }
  }
  cell.verts.push_back(point);
  cell.tight.push_back(std::move(tight));
}

CutCell side_cell(const CutCell& cell, const Classified& cls,
                  const std::vector<NewVertex>& crossings,
                  const Eigen::VectorXd& an, double bn, bool below) {
  CutCell out;
  const int row_idx = static_cast<int>(cell.C.rows());
  out.C.resize(cell.C.rows() + 1, cell.C.cols());
  out.C.topRows(cell.C.rows()) = cell.C;
  out.d.resize(cell.d.size() + 1);
  out.d.head(cell.d.size()) = cell.d;
  if (below) {
    out.C.row(row_idx) = an.transpose();
    out.d(row_idx) = bn;
  } else {
    out.C.row(row_idx) = -an.transpose();
    out.d(row_idx) = -bn;
  }

  const std::vector<int>& keep = below ? cls.in : cls.out;
  double eps = 0.0;
  for (int i : keep) {
    out.verts.push_back(cell.verts[i]);
    out.tight.push_back(cell.tight[i]);
    eps = std::max(eps, cell.verts[i].lpNorm<Eigen::Infinity>());
  }
  for (int i : cls.on) {
    std::vector<int> t = cell.tight[i];
    t.push_back(row_idx);
    out.verts.push_back(cell.verts[i]);
    out.tight.push_back(std::move(t));
  }
  eps = 1e-9 * (1.0 + eps);
  for (const NewVertex& nv : crossings) {
    std::vector<int> t = nv.tight;
    t.push_back(row_idx);
    std::sort(t.begin(), t.end());
    add_or_merge(out, nv.point, std::move(t), eps);
  }
  return out;
}

}  // namespace

HPolytope::HPolytope(Eigen::MatrixXd C_, Eigen::VectorXd d_)
    : C(std::move(C_)), d(std::move(d_)) {
  if (C.rows() != d.size()) {
    throw DimensionMismatch("HPolytope: C has " + std::to_string(C.rows()) +
                            " rows but d has " + std::to_string(d.size()) +
                            " entries");
  }
}

HPolytope HPolytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(lo.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, n);
  Eigen::VectorXd d(2 * n);
  for (int i = 0; i < n; ++i) {
    C(2 * i, i) = 1.0;
    d(2 * i) = hi(i);
    C(2 * i + 1, i) = -1.0;
    d(2 * i + 1) = -lo(i);
  }
  return HPolytope(std::move(C), std::move(d));
}

HPolytope HPolytope::cube(int dim, double lo, double hi) {
  return box(Eigen::VectorXd::Constant(dim, lo),
             Eigen::VectorXd::Constant(dim, hi));
}

LPResult solve_lp(const Eigen::VectorXd& objective, const HPolytope& P,
                  LPSense sense, const Tolerances& tol) {
  if (objective.size() != P.dim()) {
    throw DimensionMismatch("solve_lp: objective has " +
                            std::to_string(objective.size()) +
                            " entries for a " + std::to_string(P.dim()) +
                            "-dimensional polytope");
  }
  return solve_lp(objective, P.C, P.d, sense, tol);
}

std::pair<Eigen::VectorXd, double> chebyshev_center(const HPolytope& P,
                                                    const Tolerances& tol) {
  const int n = P.dim();
  const int m = P.rows();
  Eigen::MatrixXd C(m, n + 1);
  C.leftCols(n) = P.C;
  for (int i = 0; i < m; ++i) C(i, n) = P.C.row(i).norm();
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(n + 1);
  obj(n) = 1.0;
  LPResult r = solve_lp(obj, C, P.d, LPSense::Maximize, tol);
  if (r.status == LPStatus::Infeasible) {
    throw EmptyPolytope("chebyshev_center: polytope is empty");
  }
  if (r.status == LPStatus::Unbounded) {
    throw UnboundedPolytope("chebyshev_center: inscribed radius is unbounded");
  }
  double radius = r.objective;
  if (radius < -10 * tol.lp) {
    throw EmptyPolytope("chebyshev_center: polytope is empty");
  }
  return {r.point.head(n), std::max(radius, 0.0)};
}

bool is_empty(const HPolytope& P, const Tolerances& tol) {
  return !lp_feasible(P.C, P.d, tol);
}

bool contains(const HPolytope& P, const Eigen::VectorXd& x, double tol) {
  for (int i = 0; i < P.rows(); ++i) {
    double norm = P.C.row(i).norm();
    double slack = P.d(i) - P.C.row(i).dot(x);
    if (norm < kZeroRowTol) {
      if (slack < -tol) return false;
      continue;
    }
    if (slack / norm < -tol) return false;
  }
  return true;
}

HPolytope intersect(const HPolytope& P, const HPolytope& Q) {
  if (P.dim() != Q.dim()) {
    throw DimensionMismatch("intersect: dimensions " + std::to_string(P.dim()) +
                            " and " + std::to_string(Q.dim()) + " differ");
  }
  Eigen::MatrixXd C(P.rows() + Q.rows(), P.dim());
  C.topRows(P.rows()) = P.C;
  C.bottomRows(Q.rows()) = Q.C;
  Eigen::VectorXd d(P.rows() + Q.rows());
  d.head(P.rows()) = P.d;
  d.tail(Q.rows()) = Q.d;
  return HPolytope(std::move(C), std::move(d));
}

HPolytope intersect_halfspace(const HPolytope& P, const Eigen::VectorXd& a,
                              double b, bool greater_equal) {
  Eigen::MatrixXd C(P.rows() + 1, P.dim());
  C.topRows(P.rows()) = P.C;
  Eigen::VectorXd d(P.rows() + 1);
  d.head(P.rows()) = P.d;
  if (greater_equal) {
    C.row(P.rows()) = -a.transpose();
    d(P.rows()) = -b;
  } else {
    C.row(P.rows()) = a.transpose();
    d(P.rows()) = b;
  }
  return HPolytope(std::move(C), std::move(d));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const HPolytope& P,
                                                         const Tolerances& tol) {
  const int n = P.dim();
  Eigen::VectorXd lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = 1.0;
    LPResult up = solve_lp(e, P.C, P.d, LPSense::Maximize, tol);
    if (up.status == LPStatus::Infeasible)
      throw EmptyPolytope("bounding_box: polytope is empty");
    if (up.status == LPStatus::Unbounded)
      throw UnboundedPolytope("bounding_box: unbounded in +x" +
                              std::to_string(i));
    LPResult down = solve_lp(e, P.C, P.d, LPSense::Minimize, tol);
    if (down.status == LPStatus::Unbounded)
      throw UnboundedPolytope("bounding_box: unbounded in -x" +
                              std::to_string(i));
    hi(i) = up.objective;
    lo(i) = down.objective;
  }
  return {lo, hi};
}

namespace {

CutCell make_box_cell(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(lo.size());
  CutCell cell;
  HPolytope box = HPolytope::box(lo, hi);
  cell.C = box.C;
  cell.d = box.d;
  const int corners = 1 << n;
  cell.verts.reserve(corners);
  cell.tight.reserve(corners);
  for (int mask = 0; mask < corners; ++mask) {
    Eigen::VectorXd v(n);
    std::vector<int> t;
    for (int i = 0; i < n; ++i) {
      bool upper = (mask >> i) & 1;
      v(i) = upper ? hi(i) : lo(i);
      t.push_back(upper ? 2 * i : 2 * i + 1);
    }
    std::sort(t.begin(), t.end());
    cell.verts.push_back(std::move(v));
    cell.tight.push_back(std::move(t));
  }
  return cell;
}

VPolytope vertices_active_set(const Eigen::MatrixXd& Cn,
                              const Eigen::VectorXd& dn, double dedupe_eps,
                              const Tolerances& tol) {
  const int n = static_cast<int>(Cn.cols());
  const int m = static_cast<int>(Cn.rows());
  VPolytope out;
  if (m < n) return out;

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for (;;) {
    for (int k = 0; k < n; ++k) {
      M.row(k) = Cn.row(idx[k]);
      rhs(k) = dn(idx[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    if (lu.rank() == n) {
      Eigen::VectorXd v = lu.solve(rhs);
      bool feasible = ((Cn * v - dn).array() <= tol.face).all();
      if (feasible) {
        bool dup = false;
        for (const auto& w : out.vertices) {
          if ((w - v).lpNorm<Eigen::Infinity>() <= dedupe_eps) {
            dup = true;
            break;
          }
        }
        if (!dup) out.vertices.push_back(v);
      }
    }
    // next combination
    int k = n - 1;
    while (k >= 0 && idx[k] == m - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

double combination_count(int m, int n) {
  double c = 1.0;
  for (int i = 0; i < n; ++i) c *= double(m - i) / double(i + 1);
  return c;
}

}  // namespace

CutCell make_cell(const HPolytope& P, const Tolerances& tol) {
  auto [lo, hi] = bounding_box(P, tol);  // throws on empty / unbounded
  double pad = 1.0 + 0.01 * (hi - lo).lpNorm<Eigen::Infinity>();
  CutCell cell = make_box_cell(lo.array() - pad, hi.array() + pad);

  for (int i = 0; i < P.rows(); ++i) {
    double norm = P.C.row(i).norm();
    if (norm < kZeroRowTol) continue;  // vacuous (emptiness ruled out above)
    Eigen::VectorXd a = P.C.row(i).transpose() / norm;
    double b = P.d(i) / norm;
    auto clipped = clip_cell(cell, a, b, false, tol);
    if (!clipped) throw EmptyPolytope("make_cell: clipped away");
    cell = std::move(*clipped);
  }

  // Rebuild against P's own rows: drop the auxiliary box rows and recompute
  // tight sets, so downstream adjacency tests see only real constraints.
  CutCell out;
  out.C.resize(P.rows(), P.dim());
  out.d.resize(P.rows());
  for (int i = 0; i < P.rows(); ++i) {
    double norm = P.C.row(i).norm();
    if (norm < kZeroRowTol) {
      out.C.row(i).setZero();
      out.d(i) = std::max(P.d(i), 0.0);
      continue;
    }
    out.C.row(i) = P.C.row(i) / norm;
    out.d(i) = P.d(i) / norm;
  }
  for (const auto& v : cell.verts) {
    std::vector<int> t;
    for (int i = 0; i < out.C.rows(); ++i) {
      if (std::abs(out.C.row(i).dot(v) - out.d(i)) <= tol.face) t.push_back(i);
    }
    if (static_cast<int>(t.size()) >= P.dim()) {
      out.verts.push_back(v);
      out.tight.push_back(std::move(t));
    }
  }
  return out;
}

Eigen::VectorXd CutCell::centroid() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
  for (const auto& v : verts) c += v;
  if (!verts.empty()) c /= double(verts.size());
  return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> CutCell::bbox() const {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim(), 1e300);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim(), -1e300);
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

CutResult cut_cell(const CutCell& cell, const Eigen::VectorXd& a, double b,
                   const Tolerances& tol) {
  double norm = a.norm();
  if (norm < kZeroRowTol) {
    // Degenerate plane 0 = b: the cell sits wholly on one side.
    CutResult r;
    r.outcome = b >= 0 ? CutOutcome::AllBelow : CutOutcome::AllAbove;
    return r;
  }
  Eigen::VectorXd an = a / norm;
  double bn = b / norm;
  Classified cls = classify(cell, an, bn, tol.face);

  CutResult r;
  if (cls.out.empty()) {
    r.outcome = CutOutcome::AllBelow;
    return r;
  }
  if (cls.in.empty()) {
    r.outcome = CutOutcome::AllAbove;
    return r;
  }
  std::vector<NewVertex> crossings = edge_crossings(cell, cls);
  r.outcome = CutOutcome::Split;
  r.below = side_cell(cell, cls, crossings, an, bn, true);
  r.above = side_cell(cell, cls, crossings, an, bn, false);
  return r;
}

std::optional<CutCell> clip_cell(const CutCell& cell, const Eigen::VectorXd& a,
                                 double b, bool greater_equal,
                                 const Tolerances& tol) {
  Eigen::VectorXd an = a;
  double bn = b;
  if (greater_equal) {
    an = -an;
    bn = -bn;
  }
  double norm = an.norm();
  if (norm < kZeroRowTol) {
    if (bn < -tol.face) return std::nullopt;
    CutCell out = cell;  // vacuous row, still recorded
    out.C.conservativeResize(out.C.rows() + 1, Eigen::NoChange);
    out.C.row(out.C.rows() - 1).setZero();
    out.d.conservativeResize(out.d.size() + 1);
    out.d(out.d.size() - 1) = std::max(bn, 0.0);
    return out;
  }
  an /= norm;
  bn /= norm;
  Classified cls = classify(cell, an, bn, tol.face);
  if (cls.in.empty() && cls.on.empty()) return std::nullopt;
  std::vector<NewVertex> crossings;
  if (!cls.out.empty()) crossings = edge_crossings(cell, cls);
  return side_cell(cell, cls, crossings, an, bn, true);
}

std::optional<CutCell> slice_cell(const CutCell& cell, const Eigen::VectorXd& a,
                                  double b, const Tolerances& tol) {
  double norm = a.norm();
  if (norm < kZeroRowTol) return std::nullopt;
  Eigen::VectorXd an = a / norm;
  double bn = b / norm;
  Classified cls = classify(cell, an, bn, tol.face);
  if (cls.on.empty() && (cls.in.empty() || cls.out.empty())) return std::nullopt;

  CutCell out;
  const int row0 = static_cast<int>(cell.C.rows());
  out.C.resize(row0 + 2, cell.C.cols());
  out.C.topRows(row0) = cell.C;
  out.C.row(row0) = an.transpose();
  out.C.row(row0 + 1) = -an.transpose();
  out.d.resize(row0 + 2);
  out.d.head(row0) = cell.d;
  out.d(row0) = bn;
  out.d(row0 + 1) = -bn;

  double eps = 0.0;
  for (int i : cls.on) eps = std::max(eps, cell.verts[i].lpNorm<Eigen::Infinity>());
  eps = 1e-9 * (1.0 + eps);

  for (int i : cls.on) {
    std::vector<int> t = cell.tight[i];
    t.push_back(row0);
    t.push_back(row0 + 1);
    std::sort(t.begin(), t.end());
    add_or_merge(out, cell.verts[i], std::move(t), eps);
  }
  for (const NewVertex& nv : edge_crossings(cell, cls)) {
    std::vector<int> t = nv.tight;
    t.push_back(row0);
    t.push_back(row0 + 1);
    std::sort(t.begin(), t.end());
    add_or_merge(out, nv.point, std::move(t), eps);
  }
  if (out.verts.empty()) return std::nullopt;
  return out;
}

bool cell_is_degenerate(const CutCell& cell, const Tolerances& tol) {
  const int n = cell.dim();
  if (static_cast<int>(cell.verts.size()) < n + 1) return true;

  // r* <= min over rows of the largest slack any vertex attains.
  double upper = 1e300;
  Eigen::VectorXd centroid = cell.centroid();
  double lower = 1e300;
  for (int i = 0; i < cell.C.rows(); ++i) {
    if (cell.C.row(i).norm() < kZeroRowTol) continue;
    double best = -1e300;
    for (const auto& v : cell.verts)
      best = std::max(best, cell.d(i) - cell.C.row(i).dot(v));
    upper = std::min(upper, best);
    lower = std::min(lower, cell.d(i) - cell.C.row(i).dot(centroid));
  }
  if (upper < tol.radius) return true;
  if (lower >= tol.radius) return false;
  try {
    auto [c, r] = chebyshev_center(cell.polytope(), tol);
    (void)c;
    return r < tol.radius;
  } catch (const EmptyPolytope&) {
    return true;
  }
}

VPolytope vertices(const HPolytope& P, const Tolerances& tol) {
  const int n = P.dim();
  Eigen::VectorXd lo, hi;
  try {
    std::tie(lo, hi) = bounding_box(P, tol);
  } catch (const EmptyPolytope&) {
    return {};
  }

  VPolytope out;
  double scale = 1.0 + std::max(hi.lpNorm<Eigen::Infinity>(),
                                lo.lpNorm<Eigen::Infinity>());
  double dedupe_eps = 1e-7 * scale;

  std::vector<int> keep;
  for (int i = 0; i < P.rows(); ++i) {
    if (P.C.row(i).norm() >= kZeroRowTol) keep.push_back(i);
  }
  Eigen::MatrixXd Cn(keep.size(), n);
  Eigen::VectorXd dn(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    double norm = P.C.row(keep[k]).norm();
    Cn.row(k) = P.C.row(keep[k]) / norm;
    dn(k) = P.d(keep[k]) / norm;
  }

  if (n <= 4 && combination_count(static_cast<int>(Cn.rows()), n) <= 2e6) {
    out = vertices_active_set(Cn, dn, dedupe_eps, tol);
  } else {
    CutCell cell = make_cell(P, tol);
    out.vertices = cell.verts;
  }
  std::sort(out.vertices.begin(), out.vertices.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              for (int i = 0; i < a.size(); ++i) {
                if (a(i) != b(i)) return a(i) < b(i);
              }
              return false;
            });
  return out;
}

std::vector<Face> faces(const HPolytope& P) {
  std::vector<Face> out;
  out.reserve(P.rows());
  for (int i = 0; i < P.rows(); ++i) {
    Face f;
    f.parent = P;
    f.row_index = i;
    f.geometry =
        intersect_halfspace(P, P.C.row(i).transpose(), P.d(i), /*ge=*/true);
    out.push_back(std::move(f));
  }
  return out;
}

HPolytope remove_redundant(const HPolytope& P, const Tolerances& tol) {
  const int n = P.dim();

  // Normalize, drop vacuous zero rows, and coalesce duplicates up front.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < P.rows(); ++i) {
    double norm = P.C.row(i).norm();
    if (norm < kZeroRowTol) {
      if (P.d(i) < -tol.lp) return P;  // empty set, nothing to certify
      continue;
    }
    Eigen::VectorXd a = P.C.row(i).transpose() / norm;
    double b = P.d(i) / norm;
    bool dup = false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if ((rows[k] - a).lpNorm<Eigen::Infinity>() <= 1e-12) {
        rhs[k] = std::min(rhs[k], b);
        dup = true;
        break;
      }
    }
    if (!dup) {
      rows.push_back(a);
      rhs.push_back(b);
    }
  }

  std::vector<bool> alive(rows.size(), true);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Maximize this row over the others, with its own bound relaxed so the
    // LP stays bounded in that direction.
    std::vector<int> others;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (alive[k]) others.push_back(static_cast<int>(k));
    Eigen::MatrixXd C(others.size(), n);
    Eigen::VectorXd d(others.size());
    for (std::size_t k = 0; k < others.size(); ++k) {
      C.row(k) = rows[others[k]].transpose();
      d(k) = rhs[others[k]] + (others[k] == static_cast<int>(i) ? 1.0 : 0.0);
    }
    LPResult r = solve_lp(rows[i], C, d, LPSense::Maximize, tol);
    if (r.status == LPStatus::Infeasible) return P;  // empty set
    if (r.status == LPStatus::Optimal && r.objective <= rhs[i] + 10 * tol.lp) {
      alive[i] = false;
    }
  }

  int count = static_cast<int>(std::count(alive.begin(), alive.end(), true));
  Eigen::MatrixXd C(count, n);
  Eigen::VectorXd d(count);
  int k = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!alive[i]) continue;
    C.row(k) = rows[i].transpose();
    d(k) = rhs[i];
    ++k;
  }
  HPolytope out(std::move(C), std::move(d));
  out.open = P.open;
  return out;
}

}  // namespace polyinv
