#ifndef POLYINV_SEGMENTATION_HPP
#define POLYINV_SEGMENTATION_HPP

#include <vector>

#include "polyinv/geometry.hpp"
#include "polyinv/network.hpp"
#include "polyinv/tolerances.hpp"

namespace polyinv {

/// A cell of the input domain on which the network is one affine map up to
/// layer `depth`. Carries its vertex set alongside the H-form; both describe
/// the same polytope.
struct LinearRegion {
  HPolytope polytope;
  CutCell cell;
  ActiveParams params;        // E[0..depth], G[0..depth]
  ActivationPattern pattern;  // one segment vector per refined layer
  int depth = 0;
  int id = -1;
  int parent = -1;

  const std::vector<Eigen::VectorXd>& vertices() const { return cell.verts; }
};

struct RegionNode {
  LinearRegion region;
  std::vector<int> children;
  bool frozen = false;  // pruned away: never expanded, never reported
};

struct RegionTree {
  std::vector<RegionNode> nodes;

  /// Ids of unfrozen regions fully refined through `layer` layers.
  std::vector<int> leaves_at(int layer) const;
};

/// Candidate separating hyperplane normal.x = offset of one neuron's
/// breakpoint, expressed in input coordinates through the region's active
/// parameters. `degenerate` marks a constant preactivation: the plane does
/// not cut, the neuron's segment is fixed by the constant.
struct RegionHyperplane {
  Eigen::VectorXd normal;
  double offset;
  int neuron;
  int breakpoint;
  bool degenerate;
};

struct SegmentOptions {
  bool prune = true;
  int threads = 1;
  Tolerances tol;
};

/// Hyperplanes of layer `region.depth` inside `region`, ordered by neuron
/// then breakpoint.
std::vector<RegionHyperplane> region_hyperplanes(const Layer& layer,
                                                 const LinearRegion& region);

/// Arrangement of the given hyperplanes restricted to the region: recursive
/// halfspace splitting, empty and degenerate cells discarded. Children carry
/// the parent pattern plus this layer's segments and freshly extended
/// active parameters. Ids are left unassigned.
std::vector<LinearRegion> split_region(const Network& net,
                                       const LinearRegion& region,
                                       const std::vector<RegionHyperplane>& hps,
                                       const Tolerances& tol = Tolerances{});

/// Full region tree of the network over S. With pruning, regions touching
/// neither the border of S nor an obstacle closure are frozen at every
/// layer, including the last.
RegionTree segment_tree(const Network& net, const HPolytope& S,
                        const std::vector<HPolytope>& obstacles,
                        const SegmentOptions& opts = SegmentOptions{});

/// Leaf regions refined through all layers. prune=false yields a partition
/// of S; prune=true only the regions Theorem-style boundary checks consume.
std::vector<LinearRegion> segment(const Network& net, const HPolytope& S,
                                  const std::vector<HPolytope>& obstacles,
                                  const SegmentOptions& opts = SegmentOptions{});

struct PartitionReport {
  int samples = 0;
  int uncovered = 0;
  int overlapping_pairs = 0;
  double max_overlap_radius = 0.0;
  int facet_pairs = 0;
  double max_continuity_defect = 0.0;

  double coverage_gap() const {
    return samples == 0 ? 0.0 : double(uncovered) / double(samples);
  }
};

/// Monte-Carlo coverage, pairwise interior-overlap and facet-continuity
/// diagnostics for an unpruned segmentation.
PartitionReport verify_partition(const std::vector<LinearRegion>& regions,
                                 const HPolytope& S, int samples = 10000,
                                 unsigned seed = 0,
                                 const Tolerances& tol = Tolerances{});

}  // namespace polyinv

#endif
