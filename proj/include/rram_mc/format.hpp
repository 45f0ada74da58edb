#pragma once

#include <cstdio>
#include <string>

namespace rram_mc {

// Nine significant digits, the precision used for every CSV artifact.
inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Shortest form that round-trips a double; used for config echoes.
inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace rram_mc
