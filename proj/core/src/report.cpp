#include "polyinv/report.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "polyinv/parallel.hpp"
#include "polyinv/version.hpp"

namespace polyinv {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json violation_to_json(const Violation& v) {
  ordered_json j;
  j["kind"] = v.kind == PieceKind::Outer ? "outer" : "obstacle";
  if (v.kind == PieceKind::Obstacle) j["obstacle"] = v.obstacle;
  j["face_row"] = v.face_row;
  j["region"] = v.region;
  std::vector<double> vertex(v.vertex.data(), v.vertex.data() + v.vertex.size());
  j["vertex"] = vertex;
  j["margin"] = v.margin;
  return j;
}

}  // namespace

Report run_verify(const Problem& problem, const RunFlags& flags,
                  const std::string& problem_path) {
  Report report;
  report.prune = flags.prune.value_or(problem.options.prune);
  report.early_exit = flags.early_exit.value_or(problem.options.early_exit);
  report.seed = flags.seed.value_or(problem.options.seed);
  report.threads = resolve_thread_count(flags.threads);
  report.problem_path = problem_path;

  VerifyOptions opts;
  opts.prune = report.prune;
  opts.early_exit = report.early_exit;
  opts.threads = report.threads;
  opts.probe_seed = report.seed;
  opts.tol = problem.options.tol;

  SegmentOptions seg_opts;
  seg_opts.prune = report.prune;
  seg_opts.threads = report.threads;
  seg_opts.tol = problem.options.tol;

  auto t0 = std::chrono::steady_clock::now();
  report.regions =
      segment(problem.network, problem.safe_set, problem.obstacles, seg_opts);
  double segment_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  report.verdict = check_regions(problem.system, problem.safe_set,
                                 problem.obstacles, report.regions, opts);
  report.verdict.stats.segment_seconds = segment_seconds;
  return report;
}

std::string report_to_json(const Report& report, bool include_timings) {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  if (!report.problem_path.empty()) j["problem"] = report.problem_path;
  j["options"] = {{"prune", report.prune},
                  {"early_exit", report.early_exit},
                  {"seed", report.seed},
                  {"threads", report.threads}};
  j["verdict"] = report.verdict.safe ? "safe" : "unsafe";
  j["stats"] = {{"regions", report.verdict.stats.region_count},
                {"pieces", report.verdict.stats.piece_count},
                {"vertices_checked", report.verdict.stats.vertex_count},
                {"marginal", report.verdict.stats.marginal_count}};
  ordered_json violations = ordered_json::array();
  for (const Violation& v : report.verdict.violations) {
    violations.push_back(violation_to_json(v));
  }
  j["violations"] = violations;
  ordered_json marginal = ordered_json::array();
  for (const Violation& v : report.verdict.marginal) {
    marginal.push_back(violation_to_json(v));
  }
  j["marginal"] = marginal;
  if (include_timings) {
    j["timings"] = {{"segment_seconds", report.verdict.stats.segment_seconds},
                    {"pieces_seconds", report.verdict.stats.pieces_seconds},
                    {"check_seconds", report.verdict.stats.check_seconds}};
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const Report& report) {
  std::ostringstream out;
  const VerdictStats& s = report.verdict.stats;
  out << "verdict:          " << (report.verdict.safe ? "SAFE" : "UNSAFE")
      << "\n";
  out << "regions:          " << s.region_count << "\n";
  out << "boundary pieces:  " << s.piece_count << "\n";
  out << "vertices checked: " << s.vertex_count << "\n";
  out << "marginal:         " << s.marginal_count << "\n";
  out << "timings [s]:      segment " << s.segment_seconds << ", pieces "
      << s.pieces_seconds << ", check " << s.check_seconds << "\n";
  if (!report.verdict.violations.empty()) {
    out << "violations (" << report.verdict.violations.size() << "):\n";
    for (const Violation& v : report.verdict.violations) {
      out << "  " << (v.kind == PieceKind::Outer ? "outer" : "obstacle");
      if (v.kind == PieceKind::Obstacle) out << "[" << v.obstacle << "]";
      out << " face " << v.face_row << ", region " << v.region << ", vertex (";
      for (int i = 0; i < v.vertex.size(); ++i) {
        if (i) out << ", ";
        out << v.vertex(i);
      }
      out << "), margin " << v.margin << "\n";
    }
  }
  return out.str();
}

int report_exit_code(const Report& report) {
  return report.verdict.safe ? 0 : 1;
}

}  // namespace polyinv
