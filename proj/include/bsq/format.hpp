#pragma once

#include <cstdio>
#include <string>

namespace bsq {

/// %.17g, enough to round-trip any IEEE-754 double.
inline std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace bsq
