#ifndef POLYINV_PLOT_HPP
#define POLYINV_PLOT_HPP

#include <string>
#include <vector>

#include "polyinv/geometry.hpp"
#include "polyinv/invariance.hpp"
#include "polyinv/segmentation.hpp"

namespace polyinv {

/// SVG rendering of a 2-D segmentation: one polygon per region colored by a
/// hash of its activation pattern, the safe-set outline, obstacles in red,
/// and a marker on every violated vertex. Byte-deterministic for identical
/// inputs. Throws NotPlottable unless the ambient dimension is 2.
std::string render_region_plot(const HPolytope& S,
                               const std::vector<HPolytope>& obstacles,
                               const std::vector<LinearRegion>& regions,
                               const Verdict& verdict);

/// Renders and writes to out_path.
void plot_regions(const HPolytope& S, const std::vector<HPolytope>& obstacles,
                  const std::vector<LinearRegion>& regions,
                  const Verdict& verdict, const std::string& out_path);

}  // namespace polyinv

#endif
