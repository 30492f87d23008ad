#include "polyinv/invariance.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <string>
#include <unordered_map>

#include "polyinv/errors.hpp"
#include "polyinv/parallel.hpp"

namespace polyinv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Clips a region cell to an obstacle closure, then restricts to one face
// plane. Returns the piece cell or nullopt when the intersection is empty.
std::optional<CutCell> obstacle_face_piece(const CutCell& region_cell,
                                           const HPolytope& obstacle,
                                           int face_row, const Tolerances& tol) {
  CutCell cell = region_cell;
  for (int j = 0; j < obstacle.rows(); ++j) {
    if (j == face_row) continue;
    auto clipped = clip_cell(cell, obstacle.C.row(j).transpose(), obstacle.d(j),
                             /*greater_equal=*/false, tol);
    if (!clipped) return std::nullopt;
    cell = std::move(*clipped);
  }
  return slice_cell(cell, obstacle.C.row(face_row).transpose(),
                    obstacle.d(face_row), tol);
}

void probe_face_coverage(const HPolytope& face_geometry, const char* label,
                         int face_row,
                         const std::vector<LinearRegion>& regions,
                         const VerifyOptions& opts) {
  VPolytope fv = vertices(face_geometry, opts.tol);
  if (fv.vertices.empty()) return;
  std::mt19937_64 rng(opts.probe_seed + 977u * static_cast<unsigned>(face_row));
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  for (int trial = 0; trial < opts.probes_per_face; ++trial) {
    Eigen::VectorXd w(fv.vertices.size());
    for (int i = 0; i < w.size(); ++i) w(i) = weight(rng);
    double s = w.sum();
    if (s <= 0) continue;
    w /= s;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(face_geometry.dim());
    for (std::size_t k = 0; k < fv.vertices.size(); ++k)
      p += w(k) * fv.vertices[k];
    bool covered = false;
    for (const LinearRegion& r : regions) {
      if (contains(r.polytope, p, opts.tol.face)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      throw CoverageGap(std::string("boundary_pieces: probe on ") + label +
                        " face " + std::to_string(face_row) +
                        " lies in no region");
    }
  }
}

}  // namespace

void LinearSystem::validate() const {
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("LinearSystem: A must be square, got " +
                            std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()));
  }
  if (B.rows() != A.rows()) {
    throw DimensionMismatch("LinearSystem: B has " + std::to_string(B.rows()) +
                            " rows, A has " + std::to_string(A.rows()));
  }
}

ClosedLoopPiece closed_loop_piece(const LinearSystem& sys,
                                  const LinearRegion& region) {
  const Eigen::MatrixXd& E = region.params.output_E();
  const Eigen::VectorXd& G = region.params.output_G();
  if (sys.B.cols() != E.rows()) {
    throw DimensionMismatch("closed_loop_piece: B has " +
                            std::to_string(sys.B.cols()) +
                            " columns but the controller emits " +
                            std::to_string(E.rows()) + " outputs");
  }
  ClosedLoopPiece piece;
  piece.A_cl = sys.A + sys.B * E;
  piece.b_cl = sys.B * G;
  piece.region = region.id;
  return piece;
}

std::vector<BoundaryPiece> boundary_pieces(
    const HPolytope& S, const std::vector<HPolytope>& obstacles,
    const std::vector<LinearRegion>& regions, const VerifyOptions& opts) {
  const Tolerances& tol = opts.tol;
  HPolytope S_min = remove_redundant(S, tol);

  std::vector<HPolytope> obstacles_min;
  obstacles_min.reserve(obstacles.size());
  for (const HPolytope& o : obstacles) {
    obstacles_min.push_back(remove_redundant(o, tol));
  }

  std::vector<BoundaryPiece> pieces;

  for (int i = 0; i < S_min.rows(); ++i) {
    Eigen::VectorXd a = S_min.C.row(i).transpose();
    double b = S_min.d(i);
    for (const LinearRegion& region : regions) {
      auto piece_cell = slice_cell(region.cell, a, b, tol);
      if (!piece_cell) continue;
      BoundaryPiece piece;
      piece.kind = PieceKind::Outer;
      piece.face_row = i;
      piece.region = region.id;
      piece.geometry = piece_cell->polytope();
      piece.verts = std::move(piece_cell->verts);
      piece.normal = a;
      pieces.push_back(std::move(piece));
    }
    probe_face_coverage(intersect_halfspace(S_min, a, b, /*ge=*/true), "outer",
                        i, regions, opts);
  }

  for (std::size_t k = 0; k < obstacles_min.size(); ++k) {
    const HPolytope& obs = obstacles_min[k];
    for (int i = 0; i < obs.rows(); ++i) {
      for (const LinearRegion& region : regions) {
        auto piece_cell = obstacle_face_piece(region.cell, obs, i, tol);
        if (!piece_cell) continue;
        BoundaryPiece piece;
        piece.kind = PieceKind::Obstacle;
        piece.obstacle = static_cast<int>(k);
        piece.face_row = i;
        piece.region = region.id;
        piece.geometry = piece_cell->polytope();
        piece.verts = std::move(piece_cell->verts);
        piece.normal = obs.C.row(i).transpose();
        pieces.push_back(std::move(piece));
      }
      probe_face_coverage(
          intersect_halfspace(obs, obs.C.row(i).transpose(), obs.d(i), true),
          "obstacle", i, regions, opts);
    }
  }
  return pieces;
}

std::vector<std::pair<Eigen::VectorXd, double>> check_piece(
    const BoundaryPiece& piece, const ClosedLoopPiece& dynamics) {
  if (piece.region != dynamics.region) {
    throw Error("check_piece: piece and dynamics disagree on the region");
  }
  std::vector<std::pair<Eigen::VectorXd, double>> out;
  out.reserve(piece.verts.size());
  for (const Eigen::VectorXd& v : piece.verts) {
    double margin = piece.normal.dot(dynamics.A_cl * v + dynamics.b_cl);
    out.emplace_back(v, margin);
  }
  return out;
}

Verdict check_regions(const LinearSystem& sys, const HPolytope& S,
                      const std::vector<HPolytope>& obstacles,
                      const std::vector<LinearRegion>& regions,
                      const VerifyOptions& opts) {
  Verdict verdict;
  verdict.stats.region_count = static_cast<int>(regions.size());

  auto t1 = Clock::now();
  std::vector<BoundaryPiece> pieces =
      boundary_pieces(S, obstacles, regions, opts);
  verdict.stats.pieces_seconds = seconds_since(t1);
  verdict.stats.piece_count = static_cast<int>(pieces.size());

  std::unordered_map<int, const LinearRegion*> by_id;
  for (const LinearRegion& r : regions) by_id[r.id] = &r;

  auto t2 = Clock::now();
  const double band = opts.tol.margin;
  std::vector<std::vector<Violation>> bad(pieces.size());
  std::vector<std::vector<Violation>> tangent(pieces.size());
  std::vector<int> counted(pieces.size(), 0);

  auto check_one = [&](std::size_t p) {
    const BoundaryPiece& piece = pieces[p];
    ClosedLoopPiece dynamics = closed_loop_piece(sys, *by_id.at(piece.region));
    auto margins = check_piece(piece, dynamics);
    counted[p] = static_cast<int>(margins.size());
    for (auto& [vertex, margin] : margins) {
      double out_of_band;  // positive = violated by that much
      if (piece.kind == PieceKind::Outer) {
        out_of_band = margin;
      } else {
        out_of_band = -margin;
      }
      if (out_of_band > band) {
        bad[p].push_back({piece.kind, piece.obstacle, piece.face_row,
                          piece.region, vertex, margin});
      } else if (out_of_band > 0) {
        tangent[p].push_back({piece.kind, piece.obstacle, piece.face_row,
                              piece.region, vertex, margin});
      }
    }
  };

  if (opts.early_exit) {
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      check_one(p);
      if (!bad[p].empty()) break;
    }
  } else {
    parallel_for(pieces.size(), opts.threads, check_one);
  }
  verdict.stats.check_seconds = seconds_since(t2);

  for (std::size_t p = 0; p < pieces.size(); ++p) {
    verdict.stats.vertex_count += counted[p];
    for (Violation& v : bad[p]) verdict.violations.push_back(std::move(v));
    for (Violation& v : tangent[p]) verdict.marginal.push_back(std::move(v));
  }
  verdict.stats.marginal_count = static_cast<int>(verdict.marginal.size());
  verdict.safe = verdict.violations.empty();
  return verdict;
}

Verdict verify(const LinearSystem& sys, const Network& net, const HPolytope& S,
               const std::vector<HPolytope>& obstacles,
               const VerifyOptions& opts) {
  sys.validate();
  net.validate();
  if (sys.state_dim() != net.n_in() || sys.state_dim() != S.dim()) {
    throw DimensionMismatch("verify: state dimension " +
                            std::to_string(sys.state_dim()) +
                            ", network input " + std::to_string(net.n_in()) +
                            " and safe set dimension " +
                            std::to_string(S.dim()) + " must agree");
  }
  if (sys.input_dim() != net.n_out()) {
    throw DimensionMismatch("verify: B has " + std::to_string(sys.input_dim()) +
                            " columns but the network emits " +
                            std::to_string(net.n_out()));
  }

  auto t0 = Clock::now();
  SegmentOptions seg_opts;
  seg_opts.prune = opts.prune;
  seg_opts.threads = opts.threads;
  seg_opts.tol = opts.tol;
  std::vector<LinearRegion> regions = segment(net, S, obstacles, seg_opts);
  double segment_seconds = seconds_since(t0);

  Verdict verdict = check_regions(sys, S, obstacles, regions, opts);
  verdict.stats.segment_seconds = segment_seconds;
  return verdict;
}

}  // namespace polyinv
