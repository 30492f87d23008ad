#ifndef POLYINV_ERRORS_HPP
#define POLYINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polyinv {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class EmptyPolytope : public Error {
 public:
  explicit EmptyPolytope(const std::string& what) : Error(what) {}
};

class UnboundedPolytope : public Error {
 public:
  explicit UnboundedPolytope(const std::string& what) : Error(what) {}
};

class EmptyDomain : public Error {
 public:
  explicit EmptyDomain(const std::string& what) : Error(what) {}
};

/// A point on a face of the safe set belongs to no linear region.
class CoverageGap : public Error {
 public:
  explicit CoverageGap(const std::string& what) : Error(what) {}
};

/// Brute-force oracle refused a problem above its size limit.
class ScaleGuard : public Error {
 public:
  explicit ScaleGuard(const std::string& what) : Error(what) {}
};

/// Simulated state diverged.
class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class NonContinuousActivation : public Error {
 public:
  explicit NonContinuousActivation(const std::string& what) : Error(what) {}
};

class ObstacleOutsideSafeSet : public Error {
 public:
  explicit ObstacleOutsideSafeSet(const std::string& what) : Error(what) {}
};

class NotPlottable : public Error {
 public:
  explicit NotPlottable(const std::string& what) : Error(what) {}
};

}  // namespace polyinv

#endif
