#include "polyinv/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyinv/errors.hpp"
#include "polyinv/parallel.hpp"

namespace polyinv {

namespace {

constexpr double kDegenerateNormalTol = 1e-12;

bool touches_border(const LinearRegion& region, const HPolytope& S,
                    double band) {
  for (const Eigen::VectorXd& v : region.cell.verts) {
    for (int i = 0; i < S.rows(); ++i) {
      double norm = S.C.row(i).norm();
      if (norm < 1e-13) continue;
      if (std::abs(S.C.row(i).dot(v) - S.d(i)) <= band * norm) return true;
    }
  }
  return false;
}

bool touches_obstacle(const LinearRegion& region, const HPolytope& obstacle,
                      const std::pair<Eigen::VectorXd, Eigen::VectorXd>& obs_bbox,
                      const Tolerances& tol) {
  auto [lo, hi] = region.cell.bbox();
  for (int i = 0; i < lo.size(); ++i) {
    if (hi(i) < obs_bbox.first(i) - tol.face) return false;
    if (lo(i) > obs_bbox.second(i) + tol.face) return false;
  }
  for (const Eigen::VectorXd& v : region.cell.verts) {
    if (contains(obstacle, v, tol.face)) return true;
  }
  HPolytope both = intersect(region.polytope, obstacle);
  return lp_feasible(both.C, both.d, tol);
}

// Splitting tracks, per cell, which side of every cutting hyperplane it
// ended up on. -1 below, +1 above.
struct WorkCell {
  CutCell cell;
  std::vector<int> side;
};

}  // namespace

std::vector<int> RegionTree::leaves_at(int layer) const {
  std::vector<int> out;
  for (const RegionNode& node : nodes) {
    if (!node.frozen && node.region.depth == layer) {
      out.push_back(node.region.id);
    }
  }
  return out;
}

std::vector<RegionHyperplane> region_hyperplanes(const Layer& layer,
                                                 const LinearRegion& region) {
  const Eigen::MatrixXd& E = region.params.E.back();
  const Eigen::VectorXd& G = region.params.G.back();
  if (layer.in_dim() != E.rows()) {
    throw DimensionMismatch("region_hyperplanes: layer expects " +
                            std::to_string(layer.in_dim()) +
                            " inputs, region params emit " +
                            std::to_string(E.rows()));
  }
  std::vector<RegionHyperplane> out;
  const int breakpoints = static_cast<int>(layer.activation.breakpoints.size());
  out.reserve(layer.out_dim() * breakpoints);
  for (int n = 0; n < layer.out_dim(); ++n) {
    Eigen::VectorXd normal = (layer.W.row(n) * E).transpose();
    double shift = layer.W.row(n).dot(G) + layer.b(n);
    bool degenerate = normal.lpNorm<Eigen::Infinity>() < kDegenerateNormalTol;
    for (int k = 0; k < breakpoints; ++k) {
      RegionHyperplane h;
      h.normal = normal;
      h.offset = layer.activation.breakpoints(k) - shift;
      h.neuron = n;
      h.breakpoint = k;
      h.degenerate = degenerate;
      out.push_back(std::move(h));
    }
  }
  return out;
}

std::vector<LinearRegion> split_region(const Network& net,
                                       const LinearRegion& region,
                                       const std::vector<RegionHyperplane>& hps,
                                       const Tolerances& tol) {
  const int l = region.depth;
  const Layer& layer = net.layers[l];

  std::vector<WorkCell> cells;
  cells.push_back({region.cell, std::vector<int>(hps.size(), 0)});

  for (std::size_t h = 0; h < hps.size(); ++h) {
    if (hps[h].degenerate) continue;
    std::vector<WorkCell> next;
    next.reserve(cells.size() + 4);
    for (WorkCell& wc : cells) {
      CutResult cut = cut_cell(wc.cell, hps[h].normal, hps[h].offset, tol);
      switch (cut.outcome) {
        case CutOutcome::AllBelow:
          wc.side[h] = -1;
          next.push_back(std::move(wc));
          break;
        case CutOutcome::AllAbove:
          wc.side[h] = +1;
          next.push_back(std::move(wc));
          break;
        case CutOutcome::Split: {
          if (!cell_is_degenerate(*cut.below, tol)) {
            WorkCell below{std::move(*cut.below), wc.side};
            below.side[h] = -1;
            next.push_back(std::move(below));
          }
          if (!cell_is_degenerate(*cut.above, tol)) {
            WorkCell above{std::move(*cut.above), wc.side};
            above.side[h] = +1;
            next.push_back(std::move(above));
          }
          break;
        }
      }
    }
    cells = std::move(next);
  }

  // Per-neuron segment: the number of breakpoints the cell lies above; a
  // constant preactivation selects its segment directly.
  std::vector<LinearRegion> children;
  children.reserve(cells.size());
  for (WorkCell& wc : cells) {
    std::vector<int> segs(layer.out_dim(), 0);
    std::vector<bool> have(layer.out_dim(), false);
    for (std::size_t h = 0; h < hps.size(); ++h) {
      const RegionHyperplane& hp = hps[h];
      if (hp.degenerate) {
        if (!have[hp.neuron]) {
          double constant = layer.W.row(hp.neuron).dot(region.params.G.back()) +
                            layer.b(hp.neuron);
          segs[hp.neuron] = layer.activation.segment_of(constant);
          have[hp.neuron] = true;
        }
        continue;
      }
      have[hp.neuron] = true;
      if (wc.side[h] > 0) segs[hp.neuron] += 1;
    }

    LinearRegion child;
    child.cell = std::move(wc.cell);
    child.polytope = child.cell.polytope();
    child.pattern = region.pattern;
    child.pattern.push_back(std::move(segs));
    child.params = region.params;
    extend_active_params(net, child.params, child.pattern.back());
    child.depth = l + 1;
    child.parent = region.id;
    children.push_back(std::move(child));
  }
  return children;
}

RegionTree segment_tree(const Network& net, const HPolytope& S,
                        const std::vector<HPolytope>& obstacles,
                        const SegmentOptions& opts) {
  net.validate();
  if (S.dim() != net.n_in()) {
    throw DimensionMismatch("segment: domain dimension " +
                            std::to_string(S.dim()) + " vs network input " +
                            std::to_string(net.n_in()));
  }
  if (is_empty(S, opts.tol)) throw EmptyDomain("segment: domain is empty");

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> obstacle_boxes;
  obstacle_boxes.reserve(obstacles.size());
  for (const HPolytope& o : obstacles) {
    obstacle_boxes.push_back(bounding_box(o, opts.tol));
  }

  RegionTree tree;
  {
    LinearRegion root;
    root.cell = make_cell(S, opts.tol);  // throws UnboundedPolytope if S is not
    root.polytope = root.cell.polytope();
    root.params = ActiveParams::seed(net.n_in());
    root.depth = 0;
    root.id = 0;
    tree.nodes.push_back({std::move(root), {}, false});
  }

  auto prune_check = [&](int id) {
    LinearRegion& region = tree.nodes[id].region;
    if (touches_border(region, S, opts.tol.face)) return;
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
      if (touches_obstacle(region, obstacles[k], obstacle_boxes[k], opts.tol))
        return;
    }
    tree.nodes[id].frozen = true;
  };

  std::vector<int> frontier = {0};
  for (int l = 0; l < net.depth(); ++l) {
    if (opts.prune) {
      for (int id : frontier) prune_check(id);
    }
    std::vector<int> active;
    for (int id : frontier) {
      if (!tree.nodes[id].frozen) active.push_back(id);
    }

    std::vector<std::vector<LinearRegion>> batches(active.size());
    parallel_for(active.size(), opts.threads, [&](std::size_t i) {
      const LinearRegion& region = tree.nodes[active[i]].region;
      auto hps = region_hyperplanes(net.layers[l], region);
      batches[i] = split_region(net, region, hps, opts.tol);
    });

    std::vector<int> next;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (LinearRegion& child : batches[i]) {
        child.id = static_cast<int>(tree.nodes.size());
        child.parent = active[i];
        tree.nodes[active[i]].children.push_back(child.id);
        next.push_back(child.id);
        tree.nodes.push_back({std::move(child), {}, false});
      }
    }
    frontier = std::move(next);
  }
  if (opts.prune) {
    for (int id : frontier) prune_check(id);
  }
  return tree;
}

std::vector<LinearRegion> segment(const Network& net, const HPolytope& S,
                                  const std::vector<HPolytope>& obstacles,
                                  const SegmentOptions& opts) {
  RegionTree tree = segment_tree(net, S, obstacles, opts);
  std::vector<LinearRegion> out;
  for (int id : tree.leaves_at(net.depth())) {
    out.push_back(tree.nodes[id].region);
  }
  return out;
}

PartitionReport verify_partition(const std::vector<LinearRegion>& regions,
                                 const HPolytope& S, int samples, unsigned seed,
                                 const Tolerances& tol) {
  PartitionReport report;
  if (regions.empty()) return report;
  const int n = S.dim();

  auto [lo, hi] = bounding_box(S, tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int drawn = 0;
  long guard = 0;
  while (drawn < samples && guard < 1000L * samples + 10000) {
    ++guard;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
    if (!contains(S, x, tol.lp)) continue;
    ++drawn;
    bool covered = false;
    for (const LinearRegion& r : regions) {
      if (contains(r.polytope, x, tol.face)) {
        covered = true;
        break;
      }
    }
    if (!covered) ++report.uncovered;
  }
  report.samples = drawn;

  // Pairwise checks, restricted to bounding-box neighbours.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> boxes;
  boxes.reserve(regions.size());
  for (const LinearRegion& r : regions) boxes.push_back(r.cell.bbox());

  for (std::size_t a = 0; a < regions.size(); ++a) {
    for (std::size_t b = a + 1; b < regions.size(); ++b) {
      bool overlap = true;
      for (int i = 0; i < n; ++i) {
        if (boxes[a].second(i) < boxes[b].first(i) - tol.face ||
            boxes[b].second(i) < boxes[a].first(i) - tol.face) {
          overlap = false;
          break;
        }
      }
      if (!overlap) continue;

      HPolytope inter = intersect(regions[a].polytope, regions[b].polytope);
      double radius = 0.0;
      try {
        radius = chebyshev_center(inter, tol).second;
      } catch (const EmptyPolytope&) {
        continue;
      }
      if (radius >= tol.radius) {
        ++report.overlapping_pairs;
        report.max_overlap_radius = std::max(report.max_overlap_radius, radius);
        continue;
      }

      // Touching pair: when the contact is a facet, the two affine maps must
      // agree along it.
      VPolytope shared = vertices(inter, tol);
      if (shared.vertices.size() < static_cast<std::size_t>(n)) continue;
      Eigen::MatrixXd diffs(shared.vertices.size() - 1, n);
      for (std::size_t k = 1; k < shared.vertices.size(); ++k) {
        diffs.row(k - 1) = (shared.vertices[k] - shared.vertices[0]).transpose();
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diffs);
      qr.setThreshold(1e-9);
      if (qr.rank() != n - 1) continue;

      ++report.facet_pairs;
      std::uniform_real_distribution<double> weight(0.01, 1.0);
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd w(shared.vertices.size());
        for (int i = 0; i < w.size(); ++i) w(i) = weight(rng);
        w /= w.sum();
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < shared.vertices.size(); ++k) {
          p += w(k) * shared.vertices[k];
        }
        Eigen::VectorXd fa = regions[a].params.output_E() * p +
                             regions[a].params.output_G();
        Eigen::VectorXd fb = regions[b].params.output_E() * p +
                             regions[b].params.output_G();
        report.max_continuity_defect =
            std::max(report.max_continuity_defect,
                     (fa - fb).lpNorm<Eigen::Infinity>());
      }
    }
  }
  return report;
}

}  // namespace polyinv
