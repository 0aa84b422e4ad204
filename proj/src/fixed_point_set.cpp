#include "rfi/fixed_point_set.hpp"

#include "rfi/detail/overloaded.hpp"
#include "rfi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfi {
namespace {

using detail::overloaded;

constexpr std::size_t kMaxPolyhedronConstraints = 16;

}  // namespace

FixedPointSet FixedPointSet::single_point(Point p) {
  require_finite(p, "single_point");
  const auto n = p.size();
  return FixedPointSet(sets::SinglePoint{std::move(p)}, n);
}

FixedPointSet FixedPointSet::ball(Point center, double radius) {
  require_finite(center, "ball");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be >= 0");
  const auto n = center.size();
  return FixedPointSet(sets::Ball{std::move(center), radius}, n);
}

FixedPointSet FixedPointSet::box(Point lo, Point hi) {
  if (lo.size() != hi.size()) throw DimensionError("box: lo and hi differ in dimension");
  require_finite(lo, "box");
  require_finite(hi, "box");
  if ((lo.array() > hi.array()).any()) throw ConfigError("box: lo must not exceed hi");
  const auto n = lo.size();
  return FixedPointSet(sets::Box{std::move(lo), std::move(hi)}, n);
}

FixedPointSet FixedPointSet::affine_from_equations(const Matrix& A, const Point& b) {
  if (A.rows() != b.size()) throw DimensionError("affine_from_equations: A and b disagree");
  const Eigen::Index n = A.cols();
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Eigen::Index rank = A.rows() == 0 ? 0 : svd.rank();
  Point origin = A.rows() == 0 ? Point(Point::Zero(n)) : Point(svd.solve(b));
  if (A.rows() > 0 && (A * origin - b).norm() > 1e-9 * std::max(1.0, b.norm())) {
    throw InconsistencyError("affine_from_equations: equations have no common solution");
  }
  Matrix directions = svd.matrixV().rightCols(n - rank);
  return FixedPointSet(sets::AffineSubspace{std::move(origin), std::move(directions)}, n);
}

FixedPointSet FixedPointSet::halfspaces(Eigen::Index dimension, std::vector<Point> normals,
                                        std::vector<double> offsets) {
  if (normals.size() != offsets.size()) throw ConfigError("halfspaces: normals/offsets length mismatch");
  if (normals.size() > kMaxPolyhedronConstraints) {
    throw ConfigError("halfspaces: at most 16 constraints are supported");
  }
  for (const auto& a : normals) {
    require_dimension(a, dimension, "halfspaces");
    if (a.norm() == 0.0) throw ConfigError("halfspaces: zero normal");
  }
  sets::HalfspaceIntersection h{dimension, std::move(normals), std::move(offsets)};
  if (!project_polyhedron(h, Point::Zero(dimension))) {
    throw InconsistencyError("halfspaces: intersection is empty");
  }
  return FixedPointSet(std::move(h), dimension);
}

FixedPointSet FixedPointSet::whole_space(Eigen::Index dimension) {
  return FixedPointSet(sets::HalfspaceIntersection{dimension, {}, {}}, dimension);
}

FixedPointSet FixedPointSet::custom(Eigen::Index dimension, std::function<double(const Point&)> dist,
                                    std::function<Point(const Point&)> nearest) {
  if (!dist) throw ConfigError("custom set requires a distance callback");
  return FixedPointSet(sets::Custom{dimension, std::move(dist), std::move(nearest)}, dimension);
}

std::optional<Point> project_polyhedron(const sets::HalfspaceIntersection& h, const Point& x) {
  const std::size_t m = h.normals.size();
  auto feasible = [&](const Point& y) {
    for (std::size_t i = 0; i < m; ++i) {
      const double scale = 1e-12 * std::max({1.0, std::abs(h.offsets[i]), h.normals[i].norm() * y.norm()});
      if (h.normals[i].dot(y) > h.offsets[i] + scale) return false;
    }
    return true;
  };
  if (feasible(x)) return x;

  // The projection is the projection onto the affine hull of its active face,
  // so it is the nearest feasible point among all active-set candidates.
  std::optional<Point> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) active.push_back(i);
    }
    Matrix A(static_cast<Eigen::Index>(active.size()), h.dimension);
    Point b(static_cast<Eigen::Index>(active.size()));
    for (std::size_t r = 0; r < active.size(); ++r) {
      A.row(static_cast<Eigen::Index>(r)) = h.normals[active[r]].transpose();
      b[static_cast<Eigen::Index>(r)] = h.offsets[active[r]];
    }
    const Matrix gram = A * A.transpose();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
    const Point lambda = cod.solve(A * x - b);
    const Point y = x - A.transpose() * lambda;
    if ((A * y - b).norm() > 1e-9 * std::max(1.0, b.norm())) continue;
    if (!feasible(y)) continue;
    const double d = (y - x).norm();
    if (d < best_dist) {
      best_dist = d;
      best = y;
    }
  }
  return best;
}

Point FixedPointSet::nearest(const Point& x) const {
  require_dimension(x, dim_, "FixedPointSet::nearest");
  return std::visit(
      overloaded{
          [&](const sets::SinglePoint& s) -> Point { return s.point; },
          [&](const sets::Ball& s) -> Point {
            const Point d = x - s.center;
            const double r = d.norm();
            if (r <= s.radius) return x;
            return s.center + (s.radius / r) * d;
          },
          [&](const sets::Box& s) -> Point { return x.cwiseMax(s.lo).cwiseMin(s.hi); },
          [&](const sets::AffineSubspace& s) -> Point {
            if (s.directions.cols() == 0) return s.origin;
            return s.origin + s.directions * (s.directions.transpose() * (x - s.origin));
          },
          [&](const sets::HalfspaceIntersection& s) -> Point {
            auto p = project_polyhedron(s, x);
            if (!p) throw InconsistencyError("halfspace intersection is empty");
            return *p;
          },
          [&](const sets::Custom& s) -> Point {
            if (!s.nearest) throw UnsupportedOperatorError("custom set has no nearest-point map");
            return s.nearest(x);
          },
      },
      set_);
}

double FixedPointSet::dist(const Point& x) const {
  require_dimension(x, dim_, "FixedPointSet::dist");
  return std::visit(
      overloaded{
          [&](const sets::SinglePoint& s) { return (x - s.point).norm(); },
          [&](const sets::Ball& s) { return std::max(0.0, (x - s.center).norm() - s.radius); },
          [&](const sets::Custom& s) { return s.dist(x); },
          [&](const auto&) { return (x - nearest(x)).norm(); },
      },
      set_);
}

std::vector<Point> FixedPointSet::probes(const Point& x) const {
  std::vector<Point> out;
  if (const auto* c = std::get_if<sets::Custom>(&set_); c && !c->nearest) return out;
  out.push_back(nearest(x));
  if (const auto* b = std::get_if<sets::Ball>(&set_)) {
    out.push_back(b->center);
    const Point d = x - b->center;
    if (d.norm() > 0.0 && b->radius > 0.0) out.push_back(b->center - (b->radius / d.norm()) * d);
  } else if (const auto* box = std::get_if<sets::Box>(&set_)) {
    Point corner(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      corner[i] = std::abs(x[i] - box->lo[i]) <= std::abs(x[i] - box->hi[i]) ? box->lo[i] : box->hi[i];
    }
    out.push_back(std::move(corner));
  } else if (const auto* a = std::get_if<sets::AffineSubspace>(&set_)) {
    for (Eigen::Index j = 0; j < a->directions.cols(); ++j) out.push_back(out.front() + a->directions.col(j));
  }
  return out;
}

std::string FixedPointSet::describe() const {
  return std::visit(
      overloaded{
          [](const sets::SinglePoint& s) { return "{" + format_point(s.point) + "}"; },
          [](const sets::Ball& s) {
            return "ball(center=" + format_point(s.center) + ", radius=" + std::to_string(s.radius) + ")";
          },
          [](const sets::Box& s) { return "box(" + format_point(s.lo) + ", " + format_point(s.hi) + ")"; },
          [](const sets::AffineSubspace& s) {
            return "affine(origin=" + format_point(s.origin) + ", dim=" + std::to_string(s.directions.cols()) + ")";
          },
          [](const sets::HalfspaceIntersection& s) {
            return "polyhedron(" + std::to_string(s.normals.size()) + " halfspaces in R^" +
                   std::to_string(s.dimension) + ")";
          },
          [](const sets::Custom&) { return std::string("custom"); },
      },
      set_);
}

}  // namespace rfi
