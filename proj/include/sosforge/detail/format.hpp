#pragma once

#include <cstdio>
#include <string>

namespace sosforge::detail {

// Shortest-faithful decimal form used by every text emitter in the library.
inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sosforge::detail
