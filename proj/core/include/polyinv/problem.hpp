#ifndef POLYINV_PROBLEM_HPP
#define POLYINV_PROBLEM_HPP

#include <string>
#include <vector>

#include "polyinv/geometry.hpp"
#include "polyinv/invariance.hpp"
#include "polyinv/network.hpp"
#include "polyinv/tolerances.hpp"

namespace polyinv {

/// A fully validated verification problem as read from a problem file.
struct Problem {
  LinearSystem system;
  Network network;
  HPolytope safe_set;
  std::vector<HPolytope> obstacles;

  struct Options {
    Tolerances tol;
    bool prune = true;
    bool early_exit = false;
    unsigned seed = 0;
  } options;
};

/// Current problem-file format. See docs/formats.md for the schema.
inline constexpr const char* kProblemFormatVersion = "1";

/// Parses and validates a problem file. Every invariant is checked eagerly:
/// dimension chains (DimensionMismatch), activation continuity
/// (NonContinuousActivation), obstacle containment (ObstacleOutsideSafeSet),
/// malformed JSON (ParseError with line information).
Problem load_problem(const std::string& path);

/// Same, from an in-memory document.
Problem parse_problem(const std::string& text, const std::string& origin = "<string>");

/// Expands "relu", "leaky_relu:a", "identity" or an explicit breakpoint
/// table into a validated activation.
PWAActivation parse_activation_spec(const std::string& name);

}  // namespace polyinv

#endif
