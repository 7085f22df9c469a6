#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace dlcert {

// Every CSV value the library writes goes through here: 9 significant digits.
inline std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

} // namespace dlcert
