#pragma once

#include "rfi/fixed_point_set.hpp"
#include "rfi/rng.hpp"
#include "rfi/sampling.hpp"
#include "rfi/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rfi {

/// A consistent stochastic feasibility problem: X_{k+1} = T_xi X_k, or
/// X_{k+1} = S_zeta T_xi X_k when a second family is present.
struct Problem {
  IndexDistribution family;
  std::optional<IndexDistribution> second_family;
  FixedPointSet feasible_set;
  /// Uniform averagedness bound of the family; in (0,1).
  double alpha_bar = 0.5;
};

/// Validates alpha_bar against the averaged constants of a finite family.
void validate(const Problem& problem);

/// The independent streams owned by one trajectory.
struct TrajectoryStreams {
  RngStream xi;
  RngStream zeta;
  RngStream initial;

  static TrajectoryStreams make(std::uint64_t base_seed, std::uint64_t stream_id);
};

/// One RFI step. Draws exactly one index per family.
Point rfi_step(const Problem& problem, const Point& x, TrajectoryStreams& streams);

struct Trajectory {
  std::vector<Point> points;  // empty unless retained
  std::vector<double> dists;  // K + 1 entries
  std::optional<std::size_t> hit;
  std::uint64_t stream_id = 0;
  Point initial;
  Point final;
};

Trajectory run_trajectory(const Problem& problem, const Point& x0, std::size_t steps,
                          TrajectoryStreams& streams, bool retain_points = true);

struct EnsembleOptions {
  std::size_t steps = 10;
  std::size_t trajectories = 1;
  std::uint64_t base_seed = 0;
  /// Scheduling only; results do not depend on it.
  unsigned threads = 1;
  bool retain_points = false;
};

struct Ensemble {
  std::vector<Trajectory> trajectories;  // ordered by stream_id
  std::vector<double> mean_dist;
  std::vector<double> feas_frac;
  std::size_t steps = 0;
  bool points_retained = false;
};

/// Trajectory m uses stream id m and draws X_0 from its own initial-law substream.
Ensemble run_ensemble(const Problem& problem, const InitialLaw& mu, const EnsembleOptions& options);

struct HittingStats {
  /// Fraction of trajectories with hit <= k.
  std::vector<double> fraction_hit;
  std::optional<double> mean_hitting_time;
  std::size_t hitters = 0;
};

HittingStats hitting_stats(const Ensemble& ensemble);

}  // namespace rfi
