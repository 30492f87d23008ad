#ifndef POLYINV_VERSION_HPP
#define POLYINV_VERSION_HPP

namespace polyinv {

inline constexpr const char* kToolName = "polyinv";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace polyinv

#endif
