#pragma once

#include "rfi/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rfi {

using KernelFn = std::function<double(double t, double s)>;
using RhsFn = std::function<double(double t)>;

/// First-kind equation (Tx)(t) = int_a^b K(t,s) x(s) ds = g(t) tabulated on a
/// uniform grid with composite-trapezoid weights. The inner product is
/// <u, v> = sum_j w_j u_j v_j.
struct DiscreteL2Problem {
  double a = 0.0;
  double b = 1.0;
  Point grid;
  Point weights;
  Matrix kernel;  // kernel(i, j) = K(t_i, s_j)
  Point rhs;
  Point row_norm_sq;
  std::vector<bool> usable;
  /// gram(i, j) = <u_i, u_j>; (T u_j)_i.
  Matrix gram;

  Eigen::Index size() const noexcept { return grid.size(); }
  std::size_t usable_rows() const;
};

DiscreteL2Problem discretize(const KernelFn& kernel, const RhsFn& g, double a, double b,
                             Eigen::Index n);

/// (Tx)_i = sum_j w_j K(t_i, s_j) x_j.
Point apply_T(const DiscreteL2Problem& problem, const Point& x);

/// x + ((g_i - (Tx)_i) / |u_i|^2) u_i. Throws RowSkippedError on an unusable row.
Point project_row(const DiscreteL2Problem& problem, std::size_t row, const Point& x);

double weighted_norm(const DiscreteL2Problem& problem, const Point& v);

struct ResidualHistory {
  std::vector<double> sup_norm;
  std::vector<double> l2_norm;
};

struct SweepResult {
  Point solution;
  ResidualHistory history;  // entry k is the residual after k projections
  std::size_t redraws = 0;  // draws that landed on unusable rows
};

/// K random row projections with t ~ unif[a,b] snapped to the nearest node.
SweepResult solve_random_sweep(const DiscreteL2Problem& problem, const Point& x0,
                               std::size_t iterations, std::uint64_t seed);

/// Built-in kernels: indicator, product_ts, gaussian_kernel.
KernelFn make_kernel(const std::string& name, double a, double b);
/// Built-in right-hand sides: half_square (t^2/2), third_t (t/3), linear (t), zero.
RhsFn make_rhs(const std::string& name);
std::vector<std::string> kernel_names();
std::vector<std::string> rhs_names();

}  // namespace rfi
