#include "rfi/chain.hpp"

#include "rfi/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace rfi {

void validate(const Problem& problem) {
  if (!(problem.alpha_bar > 0.0 && problem.alpha_bar < 1.0)) {
    throw ConfigError("alpha_bar must lie in (0,1)");
  }
  if (const auto* finite = std::get_if<laws::FiniteDiscrete>(&problem.family.variant())) {
    for (const auto& op : finite->operators) {
      const auto a = averaged_constant(op);
      if (a && *a > problem.alpha_bar) throw ConfigError("alpha_bar is below an operator's averaged constant");
    }
  }
}

TrajectoryStreams TrajectoryStreams::make(std::uint64_t base_seed, std::uint64_t stream_id) {
  return {RngStream(base_seed, stream_id, RngStream::kPrimaryFamily),
          RngStream(base_seed, stream_id, RngStream::kSecondFamily),
          RngStream(base_seed, stream_id, RngStream::kInitialLaw)};
}

Point rfi_step(const Problem& problem, const Point& x, TrajectoryStreams& streams) {
  Point y = rfi::apply(sample_index(problem.family, streams.xi).op, x);
  if (problem.second_family) y = rfi::apply(sample_index(*problem.second_family, streams.zeta).op, y);
  return y;
}

Trajectory run_trajectory(const Problem& problem, const Point& x0, std::size_t steps,
                          TrajectoryStreams& streams, bool retain_points) {
  if (steps < 1) throw ConfigError("run_trajectory: need at least one step");
  Trajectory traj;
  traj.stream_id = streams.xi.stream_id();
  traj.initial = x0;
  traj.dists.reserve(steps + 1);
  if (retain_points) traj.points.reserve(steps + 1);

  Point x = x0;
  for (std::size_t k = 0;; ++k) {
    const double d = problem.feasible_set.dist(x);
    traj.dists.push_back(d);
    if (!traj.hit && d <= kMembershipTol) traj.hit = k;
    if (retain_points) traj.points.push_back(x);
    if (k == steps) break;
    x = rfi_step(problem, x, streams);
  }
  traj.final = std::move(x);
  return traj;
}

Ensemble run_ensemble(const Problem& problem, const InitialLaw& mu, const EnsembleOptions& options) {
  if (options.trajectories < 1) throw ConfigError("run_ensemble: need at least one trajectory");
  if (options.steps < 1) throw ConfigError("run_ensemble: need at least one step");
  if (mu.dimension() != problem.feasible_set.dimension()) {
    throw DimensionError("run_ensemble: initial law and feasible set differ in dimension");
  }

  const std::size_t m_total = options.trajectories;
  Ensemble ens;
  ens.steps = options.steps;
  ens.points_retained = options.retain_points;
  ens.trajectories.resize(m_total);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = m_total;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t m = next.fetch_add(1);
      if (m >= m_total) return;
      try {
        auto streams = TrajectoryStreams::make(options.base_seed, m);
        const Point x0 = sample_initial(mu, streams.initial);
        ens.trajectories[m] = run_trajectory(problem, x0, options.steps, streams, options.retain_points);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (m < error_index) {
          error_index = m;
          error = std::current_exception();
        }
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(m_total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  // Merge in stream-id order so results do not depend on scheduling.
  const std::size_t len = options.steps + 1;
  ens.mean_dist.assign(len, 0.0);
  ens.feas_frac.assign(len, 0.0);
  for (const auto& t : ens.trajectories) {
    for (std::size_t k = 0; k < len; ++k) {
      ens.mean_dist[k] += t.dists[k];
      if (t.dists[k] <= kMembershipTol) ens.feas_frac[k] += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(m_total);
  for (std::size_t k = 0; k < len; ++k) {
    ens.mean_dist[k] *= inv;
    ens.feas_frac[k] *= inv;
  }
  return ens;
}

HittingStats hitting_stats(const Ensemble& ensemble) {
  HittingStats stats;
  const std::size_t len = ensemble.steps + 1;
  std::vector<std::size_t> first_hits(len, 0);
  double total_time = 0.0;
  for (const auto& t : ensemble.trajectories) {
    if (!t.hit) continue;
    ++first_hits[*t.hit];
    ++stats.hitters;
    total_time += static_cast<double>(*t.hit);
  }
  stats.fraction_hit.resize(len);
  std::size_t cumulative = 0;
  const double m = static_cast<double>(ensemble.trajectories.size());
  for (std::size_t k = 0; k < len; ++k) {
    cumulative += first_hits[k];
    stats.fraction_hit[k] = static_cast<double>(cumulative) / m;
  }
  if (stats.hitters > 0) stats.mean_hitting_time = total_time / static_cast<double>(stats.hitters);
  return stats;
}

}  // namespace rfi
