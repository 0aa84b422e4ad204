#pragma once

#include "rfi/chain.hpp"
#include "rfi/rng.hpp"
#include "rfi/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace rfi {

enum class MeritMethod { closed_form, monte_carlo, quadrature };

struct MeritEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  MeritMethod method = MeritMethod::closed_form;
};

/// R(x) = E |x - T_xi x|^2 estimated from N index draws of the primary family.
MeritEstimate merit_mc(const Problem& problem, const Point& x, std::size_t n, RngStream& rng);

/// R for the interval family C_r = [r - 1/2, r + 1/2], r ~ unif[eps - 1/2, 1/2 - eps].
double merit_closed_intervals(double eps, double x);
/// dR/dx for the interval family.
double grad_closed_intervals(double eps, double x);

/// R for the line family C_a = R e_a, a ~ unif[0, beta].
double merit_closed_lines(double beta, const Point& x);
Point grad_closed_lines(double beta, const Point& x);
/// sup_x dist^2(x, {0}) / R(x) for the line family, attained at x = e_{beta/2}.
double kappa_closed_lines(double beta);

/// Probability that (lambda, 0) lies in the disk B(rho e_xi, 1), xi ~ unif[0, 2 pi].
double disk_feasibility_closed(double rho, double lambda);

/// grad R(x) = 2 (x - E[P_xi x]) estimated from N draws. Requires a projector family.
Point grad_R(const Problem& problem, const Point& x, std::size_t n, RngStream& rng);

using MeritEvaluator = std::function<double(const Point&)>;
using GradientEvaluator = std::function<Point(const Point&)>;

struct RegularityReport {
  double kappa_hat = 0.0;
  Point argmax;
  /// dist^2 / R per probe, aligned with the probes that were evaluated.
  std::vector<double> ratios;
  std::size_t probes_used = 0;
  std::size_t probes_skipped = 0;  // probes within kMembershipTol of C
  /// kappa over the half of the probes farthest from C.
  double coarse_kappa_hat = 0.0;
  /// Set when refining toward C multiplies the estimate by more than 10.
  bool divergence_flag = false;
};

/// kappa_hat = max over probes of dist^2(x,C) / R(x). Throws InconsistencyError
/// when R vanishes at an infeasible probe.
RegularityReport regularity_constant(const Problem& problem, std::span<const Point> probes,
                                     const MeritEvaluator& merit);

struct KlReport {
  /// (kappa/4)|grad R|^2 - R per probe.
  std::vector<double> slack;
  double worst_slack = 0.0;
  Point worst_probe;
  bool all_pass = true;
};

/// Checks the gradient-domination inequality R(x) <= (kappa/4) |grad R(x)|^2 up to a
/// relative tolerance tol * R(x); violations near C are tiny in absolute terms.
KlReport kl_check(std::span<const Point> probes, double kappa, const MeritEvaluator& merit,
                  const GradientEvaluator& grad, double tol = 1e-12);

/// sqrt(1 - (1 - alpha) / (alpha kappa)). Throws ConfigError if the radicand is negative.
double rate_bound(double kappa, double alpha);

/// Smallest k >= 0 with k >= ln(beta eps / sqrt(kappa R(x0))) / ln(c), c = rate_bound.
long epsilon_fixed_point_budget(double kappa, double alpha, double merit_x0, double eps, double beta);

}  // namespace rfi
