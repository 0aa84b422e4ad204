#pragma once

#include "rfi/config.hpp"
#include "rfi/diagnostics.hpp"
#include "rfi/registry.hpp"
#include "rfi/sampling.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rfi {

enum class ProbeGrid { none, circle, dyadic };

struct DiagnosticsSpec {
  bool rate = false;
  bool hitting = false;
  bool fejer = false;
  bool wasserstein = false;
  bool limit_distance = false;
  std::optional<std::size_t> limit_ref;  // defaults to K
  std::optional<Convergence> expect_classification;
  bool classify = false;

  std::vector<Point> feas_prob_probes;
  std::size_t feas_prob_samples = 100000;

  ProbeGrid regularity_grid = ProbeGrid::none;
  double grid_radius = 1.0;
  std::size_t grid_count = 64;
  double grid_offset = 0.0;
  std::size_t grid_levels = 20;

  bool kl_check = false;
  std::optional<double> kl_kappa;
  std::vector<double> kl_radii{1.0};
  std::size_t kl_count = 64;
  bool kl_expect = true;

  /// Draws per Monte Carlo merit/gradient estimate when no closed form exists.
  std::size_t merit_samples = 20000;
  /// Asserts max |X_K - limit(X_0)| <= tolerance when the family has a closed-form limit.
  std::optional<double> limit_tolerance;
};

struct IntegralEqSpec {
  std::string kernel;
  std::string rhs;
  double a = 0.0;
  double b = 1.0;
  std::size_t nodes = 201;
  std::size_t iterations = 200000;
  std::optional<std::string> exact;
  std::optional<double> tolerance;
  double eval_from = 0.0;
  std::size_t history_stride = 100;
};

struct Scenario {
  std::string name;
  std::string example;
  std::uint64_t seed = 0;
  std::string output;
  bool retain_points = false;

  std::shared_ptr<BuiltProblem> problem;  // null for a pure integral-equation job
  std::optional<InitialLaw> initial;
  std::size_t steps = 0;
  std::size_t trajectories = 0;
  DiagnosticsSpec diagnostics;

  std::optional<IntegralEqSpec> integral_eq;
};

/// Parses and validates a scenario. Throws ConfigError.
Scenario parse_scenario(std::string_view text, const std::string& default_name = "scenario");

/// Loads a scenario file. A bare name without a path separator or extension
/// that does not exist on disk is looked up among the bundled scenarios.
Scenario load_scenario(const std::string& path);

}  // namespace rfi
