#ifndef POLYINV_TOLERANCES_HPP
#define POLYINV_TOLERANCES_HPP

namespace polyinv {

/// One tolerance family shared by the whole pipeline.
///
/// `lp` is the feasibility tolerance of the LP core, `face` the looser
/// band for on-hyperplane tests (constraint stacking during segmentation
/// accumulates error faster than a single solve), `radius` the Chebyshev
/// radius below which a cell counts as degenerate and is discarded, and
/// `margin` the acceptance band of the vertex condition.
struct Tolerances {
  double lp = 1e-9;
  double face = 1e-7;
  double radius = 1e-8;
  double margin = 1e-9;
};

}  // namespace polyinv

#endif
