#pragma once

#include "rfi/fixed_point_set.hpp"
#include "rfi/types.hpp"

#include <concepts>
#include <memory>
#include <type_traits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rfi {

struct DiscreteL2Problem;

namespace ops {

/// Projector onto the interval [r - 1/2, r + 1/2] of R.
struct IntervalProjector {
  double r;
};
/// Projector onto the line R (cos alpha, sin alpha) of R^2.
struct LineProjector {
  double alpha;
};
struct BallProjector {
  Point center;
  double radius;
};
/// Projector onto { x : <normal, x> <= offset }.
struct HalfspaceProjector {
  Point normal;
  double offset;
};
/// Projector onto { x : <u, x> = b }.
struct AffineHyperplaneProjector {
  Point u;
  double b;
};
/// Projector onto a singleton.
struct PointProjector {
  Point target;
};
struct Identity {};
/// Counter-clockwise rotation of R^2 by phi.
struct Rotation {
  double phi;
};
/// Huber function f(x) = x^2/(2 alpha) for |x| <= alpha, |x| - alpha/2 otherwise, as a map R -> R.
struct Huber {
  double alpha;
};
/// prox of f(x) = 1 - exp(-|x|^2), i.e. the inverse of A(x) = (1 + 2 exp(-|x|^2)) x.
struct ExpQuasiconvexProx {};
/// Projector onto one row constraint of a discretized first-kind integral equation.
struct RowProjector {
  std::shared_ptr<const DiscreteL2Problem> problem;
  std::size_t row;
};

}  // namespace ops

using OperatorSpec =
    std::variant<ops::IntervalProjector, ops::LineProjector, ops::BallProjector,
                 ops::HalfspaceProjector, ops::AffineHyperplaneProjector, ops::PointProjector,
                 ops::Identity, ops::Rotation, ops::Huber, ops::ExpQuasiconvexProx,
                 ops::RowProjector>;

struct ClassFlags {
  bool nonexpansive;
  bool paracontractive;
  bool averaged;
};

/// 1/2 for every projector, empty otherwise.
std::optional<double> averaged_constant(const OperatorSpec& op);
ClassFlags class_flags(const OperatorSpec& op);
bool is_projector(const OperatorSpec& op);
/// Required input dimension, or empty when any dimension is accepted.
std::optional<Eigen::Index> expected_dimension(const OperatorSpec& op);
std::string describe(const OperatorSpec& op);

/// T x in closed form. Throws DimensionError or NumericError.
Point apply(const OperatorSpec& op, const Point& x);

// OperatorSpec is a std::variant, so argument-dependent lookup also finds
// std::apply; this overload outranks it for non-const arguments.
template <class Op, class X>
  requires std::same_as<std::remove_cvref_t<Op>, OperatorSpec>
Point apply(Op&& op, X&& x) {
  return apply(std::as_const(op), static_cast<const Point&>(x));
}

/// Unique rho >= 0 with (1 + 2 exp(-rho^2)) rho = s, by Newton's method
/// safeguarded with the bracket [0, s]. Residual is at most 1e-12.
double solve_exp_prox_radius(double s);

/// |x - T x|.
double fixed_point_residual(const OperatorSpec& op, const Point& x);

struct AveragedReport {
  /// rhs - lhs of the averagedness inequality for each pair (negative = violated).
  std::vector<double> slack;
  std::vector<bool> pass;
  /// max(0, -min slack).
  double worst_violation = 0.0;
  bool all_pass = true;
};

/// Checks |Tx-Ty|^2 + (1-alpha)/alpha |(x-Tx)-(y-Ty)|^2 <= |x-y|^2 + 1e-9 per pair.
AveragedReport verify_averaged_sampled(const OperatorSpec& op, double alpha,
                                       std::span<const std::pair<Point, Point>> pairs);

struct ParacontractionReport {
  /// Per checked sample: min over probes y of d(x,y) - d(Tx,y).
  std::vector<double> margins;
  /// dist(x, Fix) for each checked sample, aligned with margins.
  std::vector<double> distances;
  std::size_t skipped = 0;  // samples already in Fix
  double min_margin = 0.0;
  bool all_strict = false;
};

ParacontractionReport verify_paracontraction_sampled(const OperatorSpec& op,
                                                     const FixedPointSet& fix,
                                                     std::span<const Point> samples);

}  // namespace rfi
