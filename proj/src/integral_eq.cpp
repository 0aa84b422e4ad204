#include "rfi/integral_eq.hpp"

#include "rfi/errors.hpp"
#include "rfi/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rfi {

std::size_t DiscreteL2Problem::usable_rows() const {
  return static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
}

DiscreteL2Problem discretize(const KernelFn& kernel, const RhsFn& g, double a, double b, Eigen::Index n) {
  if (n < 2) throw ConfigError("discretize: need at least two nodes");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("discretize: need finite a < b");
  DiscreteL2Problem p;
  p.a = a;
  p.b = b;
  const double h = (b - a) / static_cast<double>(n - 1);
  p.grid.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.grid[i] = a + static_cast<double>(i) * h;
  p.grid[n - 1] = b;
  p.weights = Point::Constant(n, h);
  p.weights[0] = p.weights[n - 1] = h / 2.0;

  p.kernel.resize(n, n);
  p.rhs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p.kernel(i, j) = kernel(p.grid[i], p.grid[j]);
    p.rhs[i] = g(p.grid[i]);
  }
  if (!p.kernel.allFinite()) throw NumericError("discretize: kernel produced non-finite values");
  if (!p.rhs.allFinite()) throw NumericError("discretize: right-hand side produced non-finite values");

  p.row_norm_sq = p.kernel.cwiseAbs2() * p.weights;
  const double max_norm = p.row_norm_sq.maxCoeff();
  p.usable.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    p.usable[static_cast<std::size_t>(i)] = p.row_norm_sq[i] > 0.0 && p.row_norm_sq[i] > 1e-14 * max_norm;
  }
  p.gram = p.kernel * p.weights.asDiagonal() * p.kernel.transpose();
  return p;
}

Point apply_T(const DiscreteL2Problem& problem, const Point& x) {
  require_dimension(x, problem.size(), "apply_T");
  return problem.kernel * problem.weights.cwiseProduct(x);
}

double weighted_norm(const DiscreteL2Problem& problem, const Point& v) {
  require_dimension(v, problem.size(), "weighted_norm");
  return std::sqrt(problem.weights.dot(v.cwiseAbs2()));
}

Point project_row(const DiscreteL2Problem& problem, std::size_t row, const Point& x) {
  require_dimension(x, problem.size(), "project_row");
  if (row >= problem.usable.size()) throw DimensionError("project_row: row index out of range");
  if (!problem.usable[row]) throw RowSkippedError("project_row: row " + std::to_string(row) + " is unusable");
  const auto i = static_cast<Eigen::Index>(row);
  const double tx = problem.kernel.row(i).dot(problem.weights.cwiseProduct(x));
  return x + ((problem.rhs[i] - tx) / problem.row_norm_sq[i]) * problem.kernel.row(i).transpose();
}

SweepResult solve_random_sweep(const DiscreteL2Problem& problem, const Point& x0, std::size_t iterations,
                               std::uint64_t seed) {
  require_dimension(x0, problem.size(), "solve_random_sweep");
  require_finite(x0, "solve_random_sweep");
  if (problem.usable_rows() == 0) throw ConfigError("solve_random_sweep: no usable rows");

  const Eigen::Index n = problem.size();
  const double h = (problem.b - problem.a) / static_cast<double>(n - 1);
  RngStream rng(seed, 0);
  SweepResult out;
  out.solution = x0;
  Point& x = out.solution;
  Point residual = apply_T(problem, x) - problem.rhs;

  auto record = [&] {
    out.history.sup_norm.push_back(residual.cwiseAbs().maxCoeff());
    out.history.l2_norm.push_back(weighted_norm(problem, residual));
  };
  out.history.sup_norm.reserve(iterations + 1);
  out.history.l2_norm.reserve(iterations + 1);
  record();

  for (std::size_t k = 1; k <= iterations; ++k) {
    Eigen::Index row;
    for (;;) {
      const double t = rng.uniform(problem.a, problem.b);
      row = std::clamp<Eigen::Index>(std::lround((t - problem.a) / h), 0, n - 1);
      if (problem.usable[static_cast<std::size_t>(row)]) break;
      ++out.redraws;
    }
    const double c = -residual[row] / problem.row_norm_sq[row];
    x.noalias() += c * problem.kernel.row(row).transpose();
    // T u_row is column `row` of the Gram matrix.
    residual.noalias() += c * problem.gram.col(row);
    if (k % 4096 == 0) residual = apply_T(problem, x) - problem.rhs;
    record();
  }
  return out;
}

KernelFn make_kernel(const std::string& name, double a, double b) {
  if (name == "indicator") {
    // 1_{[a,t]}(s). At the jump s = t the value is the mean of the one-sided
    // limits that exist inside [a,b], so the tabulated rows reproduce the
    // trapezoid rule on [a, t_i].
    return [a, b](double t, double s) {
      if (s < t) return s >= a ? 1.0 : 0.0;
      if (s > t) return 0.0;
      if (t <= a) return 0.0;
      if (t >= b) return 1.0;
      return 0.5;
    };
  }
  if (name == "product_ts") return [](double t, double s) { return t * s; };
  if (name == "gaussian_kernel") {
    return [](double t, double s) { return std::exp(-(t - s) * (t - s) / (2.0 * 0.1 * 0.1)); };
  }
  throw ConfigError("unknown kernel '" + name + "' (valid: indicator, product_ts, gaussian_kernel)");
}

RhsFn make_rhs(const std::string& name) {
  if (name == "half_square") return [](double t) { return t * t / 2.0; };
  if (name == "third_t") return [](double t) { return t / 3.0; };
  if (name == "linear") return [](double t) { return t; };
  if (name == "zero") return [](double) { return 0.0; };
  throw ConfigError("unknown right-hand side '" + name + "' (valid: half_square, third_t, linear, zero)");
}

std::vector<std::string> kernel_names() { return {"indicator", "product_ts", "gaussian_kernel"}; }
std::vector<std::string> rhs_names() { return {"half_square", "third_t", "linear", "zero"}; }

}  // namespace rfi
