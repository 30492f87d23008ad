#include "polyinv/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyinv/errors.hpp"

namespace polyinv {

namespace {

// FNV-1a over the pattern's segment indices; stable across runs.
std::uint64_t pattern_hash(const ActivationPattern& pattern) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& layer : pattern) {
    for (int seg : layer) {
      h ^= static_cast<std::uint64_t>(seg) + 0x9e3779b9;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string pattern_color(const ActivationPattern& pattern) {
  std::uint64_t h = pattern_hash(pattern);
  int hue = static_cast<int>(h % 360);
  int sat = 45 + static_cast<int>((h >> 16) % 30);
  int light = 65 + static_cast<int>((h >> 32) % 20);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "hsl(%d,%d%%,%d%%)", hue, sat, light);
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// Vertices sorted counterclockwise around their centroid.
std::vector<Eigen::VectorXd> polygon_order(std::vector<Eigen::VectorXd> verts) {
  if (verts.size() < 3) return verts;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : verts) c += v.head<2>();
  c /= double(verts.size());
  std::sort(verts.begin(), verts.end(),
            [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              double ta = std::atan2(a(1) - c(1), a(0) - c(0));
              double tb = std::atan2(b(1) - c(1), b(0) - c(0));
              if (ta != tb) return ta < tb;
              return a(0) < b(0);
            });
  return verts;
}

struct Mapper {
  double x0, y1, scale;
  double px(double x) const { return (x - x0) * scale + 20.0; }
  double py(double y) const { return (y1 - y) * scale + 20.0; }
};

void emit_polygon(std::ostringstream& svg, const Mapper& map,
                  const std::vector<Eigen::VectorXd>& verts,
                  const std::string& fill, const std::string& stroke,
                  double stroke_width, double fill_opacity = 1.0) {
  if (verts.size() < 2) return;
  svg << "<polygon points=\"";
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (i) svg << ' ';
    svg << fmt(map.px(verts[i](0))) << ',' << fmt(map.py(verts[i](1)));
  }
  svg << "\" fill=\"" << fill << "\"";
  if (fill_opacity != 1.0) svg << " fill-opacity=\"" << fill_opacity << "\"";
  svg << " stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width
      << "\"/>\n";
}

}  // namespace

std::string render_region_plot(const HPolytope& S,
                               const std::vector<HPolytope>& obstacles,
                               const std::vector<LinearRegion>& regions,
                               const Verdict& verdict) {
  if (S.dim() != 2) {
    throw NotPlottable("plot_regions: only 2-dimensional problems, got " +
                       std::to_string(S.dim()));
  }

  auto [lo, hi] = bounding_box(S);
  double span = std::max(hi(0) - lo(0), hi(1) - lo(1));
  if (span <= 0) span = 1.0;
  Mapper map{lo(0), hi(1), 760.0 / span};
  double width = map.px(hi(0)) + 20.0;
  double height = map.py(lo(1)) + 20.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << ' ' << fmt(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const LinearRegion& region : regions) {
    auto verts = polygon_order(region.vertices().empty()
                                   ? vertices(region.polytope).vertices
                                   : region.vertices());
    emit_polygon(svg, map, verts, pattern_color(region.pattern), "#666", 0.4);
  }

  VPolytope sv = vertices(S);
  emit_polygon(svg, map, polygon_order(sv.vertices), "none", "black", 2.0);

  for (const HPolytope& o : obstacles) {
    VPolytope ov = vertices(o);
    emit_polygon(svg, map, polygon_order(ov.vertices), "#d62728", "#8b0000",
                 1.5, 0.75);
  }

  const double r = 0.012 * span * map.scale;
  for (const Violation& v : verdict.violations) {
    double cx = map.px(v.vertex(0));
    double cy = map.py(v.vertex(1));
    svg << "<line x1=\"" << fmt(cx - r) << "\" y1=\"" << fmt(cy - r)
        << "\" x2=\"" << fmt(cx + r) << "\" y2=\"" << fmt(cy + r)
        << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    svg << "<line x1=\"" << fmt(cx - r) << "\" y1=\"" << fmt(cy + r)
        << "\" x2=\"" << fmt(cx + r) << "\" y2=\"" << fmt(cy - r)
        << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

void plot_regions(const HPolytope& S, const std::vector<HPolytope>& obstacles,
                  const std::vector<LinearRegion>& regions,
                  const Verdict& verdict, const std::string& out_path) {
  std::string svg = render_region_plot(S, obstacles, regions, verdict);
  std::ofstream out(out_path);
  if (!out) throw Error("plot_regions: cannot write " + out_path);
  out << svg;
}

}  // namespace polyinv
