#include "rfi/diagnostics.hpp"

#include "rfi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rfi {

namespace {
constexpr double kRatioFloor = 1e-12;
}

RateCurve empirical_rate(const Ensemble& ensemble, std::optional<double> r_theory) {
  if (ensemble.steps < 2) throw ConfigError("empirical_rate: need K >= 2");
  if (ensemble.mean_dist.front() <= kMembershipTol) {
    throw DegenerateError("empirical_rate: every trajectory starts feasible");
  }
  RateCurve curve;
  curve.mean_dist = ensemble.mean_dist;
  curve.r_theory = r_theory;
  const double m = static_cast<double>(ensemble.trajectories.size());
  for (std::size_t k = 0; k + 1 <= ensemble.steps; ++k) {
    const double denom = ensemble.mean_dist[k];
    if (denom <= kRatioFloor) continue;
    const double ratio = ensemble.mean_dist[k + 1] / denom;
    // Ratio of means: the delta-method variance is Var(d_{k+1} - ratio d_k) / (M mean_k^2).
    double sum_sq = 0.0;
    for (const auto& t : ensemble.trajectories) {
      const double v = t.dists[k + 1] - ratio * t.dists[k];
      sum_sq += v * v;
    }
    const double var = m > 1.0 ? sum_sq / (m - 1.0) : 0.0;
    const double se = std::sqrt(var / m) / denom;
    curve.ratios.push_back(ratio);
    curve.steps.push_back(k);
    curve.std_errors.push_back(se);
    if (r_theory && denom > 100.0 * kMembershipTol && ratio > *r_theory + 3.0 * se) {
      curve.flagged.push_back(k);
    }
  }
  return curve;
}

FeasProbReport feasibility_probability(const IndexDistribution& family, const Point& x, std::size_t n,
                                       RngStream& rng) {
  if (n < 100) throw ConfigError("feasibility_probability: need N >= 100");
  std::size_t inside = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (fixed_point_residual(sample_index(family, rng).op, x) <= kMembershipTol) ++inside;
  }
  FeasProbReport report;
  report.probe = x;
  report.n_samples = n;
  report.p_hat = static_cast<double>(inside) / static_cast<double>(n);
  report.std_error = std::sqrt(report.p_hat * (1.0 - report.p_hat) / static_cast<double>(n));
  return report;
}

Classification classify_finite_infinite(const Ensemble& ensemble) {
  if (ensemble.trajectories.size() < 1000) {
    throw ConfigError("classify_finite_infinite: need at least 1000 trajectories");
  }
  Classification c;
  const bool one_step = std::all_of(ensemble.trajectories.begin(), ensemble.trajectories.end(),
                                    [](const Trajectory& t) { return t.hit && *t.hit <= 1; });
  c.kind = one_step ? Convergence::OneStep : Convergence::NeverCertain;
  if (!one_step) {
    for (std::size_t k = 0; k < ensemble.feas_frac.size(); ++k) {
      if (ensemble.feas_frac[k] >= 1.0) {
        c.contradiction = true;
        c.contradiction_step = k;
        break;
      }
    }
  }
  return c;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("wasserstein_1d: sample counts differ");
  if (a.empty()) throw ShapeError("wasserstein_1d: empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

std::vector<double> limit_distance_curve(const Ensemble& ensemble, std::size_t k_ref) {
  if (!ensemble.points_retained) throw ConfigError("limit_distance_curve: points were not retained");
  if (k_ref > ensemble.steps) throw ConfigError("limit_distance_curve: k_ref exceeds the simulated steps");
  std::vector<double> curve(k_ref + 1, 0.0);
  for (const auto& t : ensemble.trajectories) {
    const Point& limit = t.points[k_ref];
    for (std::size_t k = 0; k <= k_ref; ++k) curve[k] += (t.points[k] - limit).norm();
  }
  const double inv = 1.0 / static_cast<double>(ensemble.trajectories.size());
  for (double& v : curve) v *= inv;
  return curve;
}

std::vector<double> wasserstein_curve(const Ensemble& ensemble, std::size_t k_ref) {
  if (!ensemble.points_retained) throw ConfigError("wasserstein_curve: points were not retained");
  if (k_ref > ensemble.steps) throw ConfigError("wasserstein_curve: k_ref exceeds the simulated steps");
  const std::size_t m = ensemble.trajectories.size();
  std::vector<double> ref(m);
  for (std::size_t i = 0; i < m; ++i) ref[i] = ensemble.trajectories[i].points[k_ref][0];
  std::vector<double> curve(k_ref + 1);
  std::vector<double> sample(m);
  for (std::size_t k = 0; k <= k_ref; ++k) {
    for (std::size_t i = 0; i < m; ++i) sample[i] = ensemble.trajectories[i].points[k][0];
    curve[k] = wasserstein_1d(sample, ref);
  }
  return curve;
}

}  // namespace rfi
