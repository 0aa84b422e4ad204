#pragma once

#include "rfi/chain.hpp"
#include "rfi/sampling.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rfi {

struct RateCurve {
  std::vector<double> mean_dist;
  /// mean_dist[k+1] / mean_dist[k] for the steps whose denominator exceeds 1e-12.
  std::vector<double> ratios;
  /// Step k of each ratio.
  std::vector<std::size_t> steps;
  /// Delta-method standard error of each ratio (paired over trajectories).
  std::vector<double> std_errors;
  std::optional<double> r_theory;
  /// Steps whose ratio exceeds r_theory + 3 SE while mean_dist[k] > 100 tau_C.
  std::vector<std::size_t> flagged;
};

/// Throws DegenerateError when mean_dist[0] <= tau_C, ConfigError for K < 2.
RateCurve empirical_rate(const Ensemble& ensemble, std::optional<double> r_theory = std::nullopt);

struct FeasProbReport {
  Point probe;
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::optional<double> closed_form;
};

/// Fraction of N index draws whose operator fixes x (residual <= tau_C).
FeasProbReport feasibility_probability(const IndexDistribution& family, const Point& x,
                                       std::size_t n, RngStream& rng);

enum class Convergence { OneStep, NeverCertain };

struct Classification {
  Convergence kind = Convergence::NeverCertain;
  /// NeverCertain but some simulated feas_frac[n] == 1.
  bool contradiction = false;
  std::optional<std::size_t> contradiction_step;
};

/// Requires at least 1000 trajectories.
Classification classify_finite_infinite(const Ensemble& ensemble);

/// Exact W1 between two empirical laws of equal size on R.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// Per-step mean |X_k - X_{k_ref}| for k = 0..k_ref. Requires retained points.
std::vector<double> limit_distance_curve(const Ensemble& ensemble, std::size_t k_ref);

/// Per-step W1 between the first-coordinate laws of X_k and X_{k_ref}.
std::vector<double> wasserstein_curve(const Ensemble& ensemble, std::size_t k_ref);

}  // namespace rfi
