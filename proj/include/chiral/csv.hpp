#pragma once

#include <cstdio>
#include <string>

namespace chiral {

/// 12 significant digits, '.' decimal separator, "inf"/"-inf"/"nan" spelled
/// out.
inline std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace chiral
