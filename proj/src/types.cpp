#include "rfi/types.hpp"

#include "rfi/errors.hpp"

#include <cmath>
#include <cstdio>

namespace rfi {

void require_finite(const Point& x, const char* what) {
  if (!x.allFinite()) throw NumericError(std::string(what) + ": non-finite coordinate");
}

void require_dimension(const Point& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(x.size()));
  }
}

std::string format_point(const Point& x) {
  std::string out = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  return out + ")";
}

}  // namespace rfi
