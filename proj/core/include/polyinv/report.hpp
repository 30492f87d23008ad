#ifndef POLYINV_REPORT_HPP
#define POLYINV_REPORT_HPP

#include <optional>
#include <string>

#include "polyinv/invariance.hpp"
#include "polyinv/problem.hpp"
#include "polyinv/segmentation.hpp"

namespace polyinv {

inline constexpr const char* kReportFormatVersion = "1";

/// Command-line overrides layered over the problem file's options.
struct RunFlags {
  std::optional<bool> prune;
  std::optional<bool> early_exit;
  std::optional<unsigned> seed;
  int threads = 0;  // 0 = hardware concurrency
};

struct Report {
  Verdict verdict;
  std::vector<LinearRegion> regions;  // the regions the verdict was checked on
  bool prune = true;
  bool early_exit = false;
  unsigned seed = 0;
  int threads = 1;
  std::string problem_path;
};

/// Orchestrates segmentation, boundary pieces and vertex checks for a loaded
/// problem.
Report run_verify(const Problem& problem, const RunFlags& flags = RunFlags{},
                  const std::string& problem_path = "");

/// Machine-readable report. Wall times live under "timings" and can be
/// stripped for byte-level comparison.
std::string report_to_json(const Report& report, bool include_timings = true);

/// Human-readable summary.
std::string report_to_text(const Report& report);

/// 0 safe, 1 unsafe (errors map to 2 at the CLI boundary).
int report_exit_code(const Report& report);

}  // namespace polyinv

#endif
