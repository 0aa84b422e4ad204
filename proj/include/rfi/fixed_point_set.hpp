#pragma once

#include "rfi/types.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace rfi {

/// Closed convex sets with exact distance and nearest-point maps.
namespace sets {

struct SinglePoint {
  Point point;
};

struct Ball {
  Point center;
  double radius;  // >= 0
};

struct Box {
  Point lo;
  Point hi;
};

/// origin + span(directions); directions has orthonormal columns (possibly zero of them).
struct AffineSubspace {
  Point origin;
  Matrix directions;
};

/// { x : <normals[i], x> <= offsets[i] for all i }. With no constraints this is R^dimension.
struct HalfspaceIntersection {
  Eigen::Index dimension;
  std::vector<Point> normals;
  std::vector<double> offsets;
};

struct Custom {
  Eigen::Index dimension;
  std::function<double(const Point&)> dist;
  std::function<Point(const Point&)> nearest;  // may be empty
};

}  // namespace sets

class FixedPointSet {
 public:
  using Variant = std::variant<sets::SinglePoint, sets::Ball, sets::Box, sets::AffineSubspace,
                               sets::HalfspaceIntersection, sets::Custom>;

  static FixedPointSet single_point(Point p);
  static FixedPointSet ball(Point center, double radius);
  static FixedPointSet box(Point lo, Point hi);
  /// Solution set of A x = b; throws InconsistencyError when it is empty.
  static FixedPointSet affine_from_equations(const Matrix& A, const Point& b);
  static FixedPointSet halfspaces(Eigen::Index dimension, std::vector<Point> normals,
                                  std::vector<double> offsets);
  static FixedPointSet whole_space(Eigen::Index dimension);
  static FixedPointSet custom(Eigen::Index dimension, std::function<double(const Point&)> dist,
                              std::function<Point(const Point&)> nearest = {});

  const Variant& variant() const noexcept { return set_; }
  Eigen::Index dimension() const noexcept { return dim_; }

  double dist(const Point& x) const;
  /// Metric projection onto the set. Throws UnsupportedOperatorError for a
  /// Custom set constructed without a nearest-point map.
  Point nearest(const Point& x) const;
  bool contains(const Point& x, double tol = kMembershipTol) const { return dist(x) <= tol; }

  /// Points of the set used as witnesses y in sampled paracontraction checks:
  /// the nearest point, plus extreme points nearest to x for Ball and Box.
  std::vector<Point> probes(const Point& x) const;

  std::string describe() const;

 private:
  FixedPointSet(Variant v, Eigen::Index dim) : set_(std::move(v)), dim_(dim) {}

  Variant set_;
  Eigen::Index dim_;
};

/// Exact projection onto a polyhedron given by at most 16 halfspaces, by
/// enumerating candidate active sets. Returns nullopt if the polyhedron is empty.
std::optional<Point> project_polyhedron(const sets::HalfspaceIntersection& h, const Point& x);

}  // namespace rfi
