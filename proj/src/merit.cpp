#include "rfi/merit.hpp"

#include "rfi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rfi {

MeritEstimate merit_mc(const Problem& problem, const Point& x, std::size_t n, RngStream& rng) {
  if (n < 2) throw ConfigError("merit_mc: need at least two samples");
  // Welford running mean/variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto draw = sample_index(problem.family, rng);
    const double v = (x - rfi::apply(draw.op, x)).squaredNorm();
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n, MeritMethod::monte_carlo};
}

double merit_closed_intervals(double eps, double x) {
  if (!(eps >= 0.0 && eps < 0.5)) throw ConfigError("merit_closed_intervals: eps must lie in [0, 1/2)");
  const double ax = std::abs(x);
  if (ax < eps) return 0.0;
  const double inner = ax - eps;
  const double outer = std::min(1.0 - ax - eps, 0.0);
  return (inner * inner * inner + outer * outer * outer) / (3.0 * (1.0 - 2.0 * eps));
}

double grad_closed_intervals(double eps, double x) {
  if (!(eps >= 0.0 && eps < 0.5)) throw ConfigError("grad_closed_intervals: eps must lie in [0, 1/2)");
  const double ax = std::abs(x);
  if (ax < eps) return 0.0;
  const double inner = ax - eps;
  const double outer = std::min(1.0 - ax - eps, 0.0);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  return sign * (inner * inner - outer * outer) / (1.0 - 2.0 * eps);
}

double merit_closed_lines(double beta, const Point& x) {
  require_dimension(x, 2, "merit_closed_lines");
  if (!(beta > 0.0 && beta <= std::numbers::pi / 2)) {
    throw ConfigError("merit_closed_lines: beta must lie in (0, pi/2]");
  }
  const double sc = std::sin(beta) * std::cos(beta);
  const double s2 = std::sin(beta) * std::sin(beta);
  return (x[0] * x[0] * (beta - sc) / 2.0 + x[1] * x[1] * (beta + sc) / 2.0 - x[0] * x[1] * s2) / beta;
}

Point grad_closed_lines(double beta, const Point& x) {
  require_dimension(x, 2, "grad_closed_lines");
  if (!(beta > 0.0 && beta <= std::numbers::pi / 2)) {
    throw ConfigError("grad_closed_lines: beta must lie in (0, pi/2]");
  }
  const double sc = std::sin(beta) * std::cos(beta);
  const double s2 = std::sin(beta) * std::sin(beta);
  return make_point({(x[0] * (beta - sc) - x[1] * s2) / beta, (x[1] * (beta + sc) - x[0] * s2) / beta});
}

double kappa_closed_lines(double beta) {
  if (!(beta > 0.0 && beta <= std::numbers::pi / 2)) {
    throw ConfigError("kappa_closed_lines: beta must lie in (0, pi/2]");
  }
  // R(e_a) = (2 beta - sin(2 beta - 2a) - sin(2a)) / (4 beta), minimal at a = beta/2.
  return 2.0 * beta / (beta - std::sin(beta));
}

double disk_feasibility_closed(double rho, double lambda) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("disk_feasibility_closed: rho must lie in (0,1)");
  lambda = std::abs(lambda);
  if (lambda <= 1.0 - rho) return 1.0;
  if (lambda >= 1.0 + rho) return 0.0;
  const double c = (lambda * lambda + rho * rho - 1.0) / (2.0 * lambda * rho);
  return std::acos(std::clamp(c, -1.0, 1.0)) / std::numbers::pi;
}

Point grad_R(const Problem& problem, const Point& x, std::size_t n, RngStream& rng) {
  if (n < 1) throw ConfigError("grad_R: need at least one sample");
  Point mean_proj = Point::Zero(x.size());
  for (std::size_t j = 0; j < n; ++j) {
    const auto draw = sample_index(problem.family, rng);
    if (!is_projector(draw.op)) throw UnsupportedOperatorError("grad_R requires a projector family");
    mean_proj += rfi::apply(draw.op, x);
  }
  mean_proj /= static_cast<double>(n);
  return 2.0 * (x - mean_proj);
}

RegularityReport regularity_constant(const Problem& problem, std::span<const Point> probes,
                                     const MeritEvaluator& merit) {
  RegularityReport report;
  std::vector<std::pair<double, double>> dist_ratio;
  for (const auto& x : probes) {
    const double d = problem.feasible_set.dist(x);
    if (d <= kMembershipTol) {
      ++report.probes_skipped;
      continue;
    }
    const double r = merit(x);
    if (!(r > 0.0)) {
      throw InconsistencyError("regularity_constant: R vanishes at infeasible probe " + format_point(x));
    }
    const double ratio = d * d / r;
    report.ratios.push_back(ratio);
    dist_ratio.emplace_back(d, ratio);
    if (ratio > report.kappa_hat || report.probes_used == 0) {
      report.kappa_hat = ratio;
      report.argmax = x;
    }
    ++report.probes_used;
  }
  if (report.probes_used == 0) return report;

  std::vector<double> dists;
  for (const auto& [d, r] : dist_ratio) dists.push_back(d);
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
  const double median = dists[dists.size() / 2];
  for (const auto& [d, r] : dist_ratio) {
    if (d >= median) report.coarse_kappa_hat = std::max(report.coarse_kappa_hat, r);
  }
  report.divergence_flag = report.kappa_hat > 10.0 * report.coarse_kappa_hat;
  return report;
}

KlReport kl_check(std::span<const Point> probes, double kappa, const MeritEvaluator& merit,
                  const GradientEvaluator& grad, double tol) {
  if (!(kappa > 0.0)) throw ConfigError("kl_check: kappa must be > 0");
  KlReport report;
  bool first = true;
  for (const auto& x : probes) {
    const double r = merit(x);
    const double slack = kappa / 4.0 * grad(x).squaredNorm() - r;
    report.slack.push_back(slack);
    if (slack < -tol * r) report.all_pass = false;
    if (first || slack < report.worst_slack) {
      report.worst_slack = slack;
      report.worst_probe = x;
      first = false;
    }
  }
  return report;
}

double rate_bound(double kappa, double alpha) {
  if (!(kappa > 0.0)) throw ConfigError("rate_bound: kappa must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rate_bound: alpha must lie in (0,1)");
  const double q = (1.0 - alpha) / (alpha * kappa);
  if (q > 1.0 + 1e-12) throw ConfigError("rate_bound: (1-alpha)/(alpha kappa) exceeds 1");
  return std::sqrt(std::max(0.0, 1.0 - q));
}

long epsilon_fixed_point_budget(double kappa, double alpha, double merit_x0, double eps, double beta) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon budget: eps must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("epsilon budget: beta must lie in (0,1)");
  if (!(merit_x0 > 0.0)) throw ConfigError("epsilon budget: R(x0) must be > 0");
  const double c = rate_bound(kappa, alpha);
  const double arg = beta * eps / std::sqrt(kappa * merit_x0);
  if (arg >= 1.0) return 0;
  if (c == 0.0) return 1;
  return static_cast<long>(std::ceil(std::log(arg) / std::log(c)));
}

}  // namespace rfi
