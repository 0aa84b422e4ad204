#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <string>

namespace rfi {

/// A point of R^n. Discretized L2 functions are stored as their grid values.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute Euclidean tolerance deciding membership in a fixed-point set.
inline constexpr double kMembershipTol = 1e-9;

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

/// Throws NumericError if any coordinate is NaN or infinite.
void require_finite(const Point& x, const char* what);

/// Throws DimensionError unless x has `expected` coordinates.
void require_dimension(const Point& x, Eigen::Index expected, const char* what);

std::string format_point(const Point& x);

}  // namespace rfi
