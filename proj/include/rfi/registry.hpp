#pragma once

#include "rfi/chain.hpp"
#include "rfi/config.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rfi {

/// A Problem together with the closed-form facts known about it.
struct BuiltProblem {
  explicit BuiltProblem(Problem p) : problem(std::move(p)) {}

  Problem problem;
  std::string family;
  std::string example;
  Eigen::Index dimension = 0;
  bool all_projectors = false;
  /// dist(T x, C) <= dist(x, C) for every member (quasi-nonexpansive w.r.t. C).
  bool fejer = false;
  /// |T x| = |x| for every member (rotations).
  bool norm_preserving = false;
  std::optional<double> kappa_theory;
  /// Whether the regularity inequality holds for some finite kappa, when known.
  std::optional<bool> regular;
  std::function<double(const Point&)> merit_closed;
  std::function<Point(const Point&)> grad_closed;
  std::function<double(const Point&)> feas_prob_closed;
  /// P(X_n in C) for a Dirac start at the family's reference point.
  std::function<double(std::size_t)> feas_frac_law;
  std::optional<Point> feas_frac_law_start;
  /// Closed-form a.s. limit of the chain as a function of X_0.
  std::function<Point(const Point&)> limit_map;
};

struct FamilyInfo {
  std::string name;
  std::string example;
  std::vector<std::string> keys;  // family-specific keys besides `family` and `alpha_bar`
};

const std::vector<FamilyInfo>& builtin_families();

/// Builds the problem described by a [problem] section and an optional
/// [second_family] section. Throws ConfigError on unknown names or keys.
BuiltProblem build_problem(const ConfigSection& problem, const ConfigSection* second_family);

struct BundledScenario {
  std::string name;
  std::string path;
  std::string example;
};

/// Scenarios shipped in the scenario directory (compiled-in default).
std::vector<BundledScenario> bundled_scenarios(const std::string& dir = RFI_SCENARIO_DIR);

/// Human-readable listing of operators, families, kernels and bundled scenarios.
std::string list_builtin();

}  // namespace rfi
