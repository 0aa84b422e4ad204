#pragma once

#include "rfi/operators.hpp"
#include "rfi/rng.hpp"
#include "rfi/types.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace rfi {

namespace laws {

struct FiniteDiscrete {
  std::vector<OperatorSpec> operators;
  std::vector<double> probs;
};

/// t ~ unif[lo, hi], operator = builder(t).
struct ContinuousUniform {
  double lo;
  double hi;
  std::function<OperatorSpec(double)> builder;
};

struct Dirac {
  Point point;
};
struct UniformBox {
  Point lo;
  Point hi;
};
/// Isotropic Gaussian N(mean, stddev^2 I).
struct Gaussian {
  Point mean;
  double stddev;
};

}  // namespace laws

/// Law of the random index. Immutable after construction.
class IndexDistribution {
 public:
  using Variant = std::variant<laws::FiniteDiscrete, laws::ContinuousUniform>;

  /// Probabilities must be nonnegative and sum to 1 within 1e-12.
  static IndexDistribution finite(std::vector<OperatorSpec> operators, std::vector<double> probs);
  static IndexDistribution uniform(double lo, double hi, std::function<OperatorSpec(double)> builder);

  const Variant& variant() const noexcept { return law_; }
  bool is_finite() const noexcept { return std::holds_alternative<laws::FiniteDiscrete>(law_); }

 private:
  explicit IndexDistribution(Variant v) : law_(std::move(v)) {}
  Variant law_;
};

struct IndexDraw {
  /// Index into the finite law's operator list; 0 for continuous laws.
  std::size_t index;
  /// Drawn parameter t for continuous laws; index as a real for finite laws.
  double parameter;
  OperatorSpec op;
};

/// One draw of the random index. Always consumes exactly one uniform draw:
/// inverse CDF for finite laws, t = lo + (hi - lo) u for the uniform law.
IndexDraw sample_index(const IndexDistribution& dist, RngStream& rng);

class InitialLaw {
 public:
  using Variant = std::variant<laws::Dirac, laws::UniformBox, laws::Gaussian>;

  static InitialLaw dirac(Point p);
  static InitialLaw uniform_box(Point lo, Point hi);
  static InitialLaw gaussian(Point mean, double stddev);

  const Variant& variant() const noexcept { return law_; }
  Eigen::Index dimension() const;
  /// True when every draw equals the same point.
  bool is_dirac() const noexcept { return std::holds_alternative<laws::Dirac>(law_); }

 private:
  explicit InitialLaw(Variant v) : law_(std::move(v)) {}
  Variant law_;
};

/// One draw from the initial law. Dirac consumes nothing, UniformBox one draw
/// per coordinate, Gaussian two draws per coordinate.
Point sample_initial(const InitialLaw& law, RngStream& rng);

}  // namespace rfi
