#include "rfi/operators.hpp"

#include "rfi/detail/overloaded.hpp"
#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rfi {

using detail::overloaded;

namespace {

template <class T>
constexpr bool is_projector_type =
    std::is_same_v<T, ops::IntervalProjector> || std::is_same_v<T, ops::LineProjector> ||
    std::is_same_v<T, ops::BallProjector> || std::is_same_v<T, ops::HalfspaceProjector> ||
    std::is_same_v<T, ops::AffineHyperplaneProjector> || std::is_same_v<T, ops::PointProjector> ||
    std::is_same_v<T, ops::Identity> || std::is_same_v<T, ops::RowProjector>;

double huber(double alpha, double x) {
  const double ax = std::abs(x);
  return ax <= alpha ? x * x / (2.0 * alpha) : ax - alpha / 2.0;
}

}  // namespace

bool is_projector(const OperatorSpec& op) {
  return std::visit([](const auto& o) { return is_projector_type<std::decay_t<decltype(o)>>; }, op);
}

std::optional<double> averaged_constant(const OperatorSpec& op) {
  if (is_projector(op)) return 0.5;
  return std::nullopt;
}

ClassFlags class_flags(const OperatorSpec& op) {
  return std::visit(overloaded{
                        [](const ops::Rotation&) { return ClassFlags{true, false, false}; },
                        [](const ops::Huber&) { return ClassFlags{true, true, false}; },
                        [](const ops::ExpQuasiconvexProx&) { return ClassFlags{false, true, false}; },
                        [](const auto&) { return ClassFlags{true, true, true}; },
                    },
                    op);
}

std::optional<Eigen::Index> expected_dimension(const OperatorSpec& op) {
  return std::visit(
      overloaded{
          [](const ops::IntervalProjector&) -> std::optional<Eigen::Index> { return 1; },
          [](const ops::Huber&) -> std::optional<Eigen::Index> { return 1; },
          [](const ops::LineProjector&) -> std::optional<Eigen::Index> { return 2; },
          [](const ops::Rotation&) -> std::optional<Eigen::Index> { return 2; },
          [](const ops::BallProjector& o) -> std::optional<Eigen::Index> { return o.center.size(); },
          [](const ops::HalfspaceProjector& o) -> std::optional<Eigen::Index> { return o.normal.size(); },
          [](const ops::AffineHyperplaneProjector& o) -> std::optional<Eigen::Index> { return o.u.size(); },
          [](const ops::PointProjector& o) -> std::optional<Eigen::Index> { return o.target.size(); },
          [](const ops::RowProjector& o) -> std::optional<Eigen::Index> { return o.problem->size(); },
          [](const ops::Identity&) -> std::optional<Eigen::Index> { return std::nullopt; },
          [](const ops::ExpQuasiconvexProx&) -> std::optional<Eigen::Index> { return std::nullopt; },
      },
      op);
}

std::string describe(const OperatorSpec& op) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  return std::visit(
      overloaded{
          [&](const ops::IntervalProjector& o) { return "interval_projector(r=" + num(o.r) + ")"; },
          [&](const ops::LineProjector& o) { return "line_projector(alpha=" + num(o.alpha) + ")"; },
          [&](const ops::BallProjector& o) {
            return "ball_projector(center=" + format_point(o.center) + ", radius=" + num(o.radius) + ")";
          },
          [&](const ops::HalfspaceProjector& o) {
            return "halfspace_projector(normal=" + format_point(o.normal) + ", offset=" + num(o.offset) + ")";
          },
          [&](const ops::AffineHyperplaneProjector& o) {
            return "hyperplane_projector(u=" + format_point(o.u) + ", b=" + num(o.b) + ")";
          },
          [&](const ops::PointProjector& o) { return "point_projector(" + format_point(o.target) + ")"; },
          [&](const ops::Identity&) { return std::string("identity"); },
          [&](const ops::Rotation& o) { return "rotation(phi=" + num(o.phi) + ")"; },
          [&](const ops::Huber& o) { return "huber(alpha=" + num(o.alpha) + ")"; },
          [&](const ops::ExpQuasiconvexProx&) { return std::string("exp_quasiconvex_prox"); },
          [&](const ops::RowProjector& o) { return "row_projector(row=" + std::to_string(o.row) + ")"; },
      },
      op);
}

double solve_exp_prox_radius(double s) {
  if (!std::isfinite(s) || s < 0.0) throw NumericError("solve_exp_prox_radius: s must be finite and >= 0");
  if (s == 0.0) return 0.0;
  // A(rho) = (1 + 2 exp(-rho^2)) rho is strictly increasing with A(rho) >= rho,
  // so the root lies in [0, s].
  auto residual = [s](double rho) { return rho * (1.0 + 2.0 * std::exp(-rho * rho)) - s; };
  double lo = 0.0;
  double hi = s;
  double rho = s / 3.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = residual(rho);
    if (std::abs(f) <= 1e-12) return rho;
    if (f < 0.0) {
      lo = rho;
    } else {
      hi = rho;
    }
    const double e = std::exp(-rho * rho);
    const double df = 1.0 + 2.0 * e * (1.0 - 2.0 * rho * rho);
    double next = rho - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == rho || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      if (std::abs(residual(next)) <= 1e-12) return next;
      if (next == rho) break;
    }
    rho = next;
  }
  throw SolverError("solve_exp_prox_radius: no convergence for s = " + std::to_string(s));
}

Point apply(const OperatorSpec& op, const Point& x) {
  if (auto n = expected_dimension(op)) require_dimension(x, *n, "apply");
  require_finite(x, "apply");
  return std::visit(
      overloaded{
          [&](const ops::IntervalProjector& o) -> Point {
            Point y(1);
            y[0] = std::clamp(x[0], o.r - 0.5, o.r + 0.5);
            return y;
          },
          [&](const ops::LineProjector& o) -> Point {
            const Point n = make_point({std::sin(o.alpha), -std::cos(o.alpha)});
            return x - n.dot(x) * n;
          },
          [&](const ops::BallProjector& o) -> Point {
            const Point d = x - o.center;
            const double r = d.norm();
            if (r <= o.radius) return x;
            return o.center + (o.radius / r) * d;
          },
          [&](const ops::HalfspaceProjector& o) -> Point {
            const double excess = o.normal.dot(x) - o.offset;
            if (excess <= 0.0) return x;
            return x - (excess / o.normal.squaredNorm()) * o.normal;
          },
          [&](const ops::AffineHyperplaneProjector& o) -> Point {
            return x - ((o.u.dot(x) - o.b) / o.u.squaredNorm()) * o.u;
          },
          [&](const ops::PointProjector& o) -> Point { return o.target; },
          [&](const ops::Identity&) -> Point { return x; },
          [&](const ops::Rotation& o) -> Point {
            const double c = std::cos(o.phi);
            const double s = std::sin(o.phi);
            return make_point({c * x[0] - s * x[1], s * x[0] + c * x[1]});
          },
          [&](const ops::Huber& o) -> Point {
            Point y(1);
            y[0] = huber(o.alpha, x[0]);
            return y;
          },
          [&](const ops::ExpQuasiconvexProx&) -> Point {
            const double s = x.norm();
            if (s == 0.0) return x;
            return (solve_exp_prox_radius(s) / s) * x;
          },
          [&](const ops::RowProjector& o) -> Point { return project_row(*o.problem, o.row, x); },
      },
      op);
}

double fixed_point_residual(const OperatorSpec& op, const Point& x) { return (x - rfi::apply(op, x)).norm(); }

AveragedReport verify_averaged_sampled(const OperatorSpec& op, double alpha,
                                       std::span<const std::pair<Point, Point>> pairs) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("verify_averaged_sampled: alpha must lie in (0,1)");
  if (pairs.empty()) throw ConfigError("verify_averaged_sampled: no pairs");
  AveragedReport report;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    if (x.size() != y.size()) throw DimensionError("verify_averaged_sampled: pair dimensions differ");
    const Point tx = rfi::apply(op, x);
    const Point ty = rfi::apply(op, y);
    const double lhs = (tx - ty).squaredNorm() + (1.0 - alpha) / alpha * ((x - tx) - (y - ty)).squaredNorm();
    const double slack = (x - y).squaredNorm() - lhs;
    const bool ok = slack >= -1e-9;
    report.slack.push_back(slack);
    report.pass.push_back(ok);
    report.all_pass = report.all_pass && ok;
    min_slack = std::min(min_slack, slack);
  }
  report.worst_violation = std::max(0.0, -min_slack);
  return report;
}

ParacontractionReport verify_paracontraction_sampled(const OperatorSpec& op, const FixedPointSet& fix,
                                                     std::span<const Point> samples) {
  ParacontractionReport report;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    const double d = fix.dist(x);
    if (d <= kMembershipTol) {
      ++report.skipped;
      continue;
    }
    const Point tx = rfi::apply(op, x);
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& y : fix.probes(x)) margin = std::min(margin, (x - y).norm() - (tx - y).norm());
    report.margins.push_back(margin);
    report.distances.push_back(d);
    min_margin = std::min(min_margin, margin);
  }
  if (!report.margins.empty()) {
    report.min_margin = min_margin;
    report.all_strict = min_margin > 0.0;
  }
  return report;
}

}  // namespace rfi
