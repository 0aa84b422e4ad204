#include "rfi/errors.hpp"
#include "rfi/registry.hpp"
#include "rfi/runner.hpp"
#include "rfi/scenario.hpp"

#include <doctest.h>

#include <numbers>
#include <string>

using namespace rfi;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSmall = R"(
[problem]
family = halfspaces
p1 = 0.3

[initial]
law = dirac
point = -1, -1

[ensemble]
steps = 6
trajectories = 1000

[diagnostics]
hitting = true
fejer = true
)";

}  // namespace

TEST_CASE("bundled scenarios load") {
  const auto lines = load_scenario("lines_beta_pi2");
  REQUIRE(lines.problem);
  CHECK(lines.problem->family == "lines");
  const auto& fam = std::get<laws::ContinuousUniform>(lines.problem->problem.family.variant());
  CHECK(fam.lo == 0.0);
  CHECK(fam.hi == std::numbers::pi / 2);
  CHECK(std::holds_alternative<ops::LineProjector>(fam.builder(0.3)));
  CHECK(std::holds_alternative<sets::SinglePoint>(lines.problem->problem.feasible_set.variant()));

  const auto half = load_scenario("halfspaces_03_07");
  const auto& fd = std::get<laws::FiniteDiscrete>(half.problem->problem.family.variant());
  CHECK(fd.probs == std::vector<double>{0.3, 0.7});
  REQUIRE(half.initial->is_dirac());
  CHECK(std::get<laws::Dirac>(half.initial->variant()).point == make_point({-1.0, -1.0}));

  for (const auto& b : bundled_scenarios()) {
    CAPTURE(b.name);
    CHECK_FALSE(b.example.empty());
    const auto sc = load_scenario(b.path);
    CHECK(sc.example == b.example);
  }
  CHECK(bundled_scenarios().size() >= 11);
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(parse_scenario(""), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), ConfigError);

  const std::string unknown_key = config_error(std::string(kSmall) + "bogus = 1\n");
  CHECK(contains(unknown_key, "bogus"));
  CHECK(contains(unknown_key, "hitting"));  // lists the valid keys

  std::string s = kSmall;
  CHECK(contains(config_error(s.replace(s.find("halfspaces"), 10, "squares")), "unknown family"));
  s = kSmall;
  CHECK_FALSE(config_error(s.replace(s.find("steps = 6"), 9, "steps = 0")).empty());
  s = kSmall;
  CHECK_FALSE(config_error(s.replace(s.find("trajectories = 1000"), 19, "trajectories = 0")).empty());
  s = kSmall;
  CHECK(contains(config_error(s.replace(s.find("point = -1, -1"), 14, "point = -1")), "dimension"));
  s = kSmall;
  CHECK(contains(config_error(s.replace(s.find("trajectories = 1000"), 19, "trajectories = 10") +
                              "classify = true\n"),
                 "1000"));
  CHECK(contains(config_error("[problem]\nfamily = lines\n"), "[initial]"));
  CHECK(contains(config_error("[problem]\nfamily = lines\nbeta = 2\n[initial]\nlaw = dirac\npoint = 1,0\n"
                              "[ensemble]\nsteps=1\ntrajectories=1\n"),
                 "beta"));
  CHECK(contains(config_error("[mystery]\nx = 1\n"), "unknown section"));
  CHECK(contains(config_error("[problem]\nfamily = lines\n[initial]\nlaw = dirac\npoint = 1,0\n"
                              "[ensemble]\nsteps=1\ntrajectories=1\n[diagnostics]\nlimit_tolerance = 1e-6\n"),
                 "closed-form limit"));
  CHECK(contains(config_error("[integral_eq]\nkernel = indicator\nrhs = half_square\ntolerance = 0.1\n"),
                 "exact solution"));
  CHECK(contains(config_error("[integral_eq]\nkernel = nope\nrhs = zero\n"), "unknown kernel"));
  CHECK(contains(config_error("[problem]\nfamily = lines\nalpha_bar = 0.2\n[initial]\nlaw = dirac\npoint = 1,0\n"
                              "[ensemble]\nsteps=1\ntrajectories=1\n"),
                 "alpha"));
}

TEST_CASE("registry listing") {
  const std::string text = list_builtin();
  CHECK_FALSE(text.empty());
  CHECK(contains(text, "intervals"));
  CHECK(contains(text, "indicator"));
  CHECK(contains(text, "lines_beta_pi2"));
}

TEST_CASE("runner reports") {
  RunOptions o;
  o.write_files = false;
  const auto lines = run_scenario(load_scenario("lines_beta_pi2"), o);
  CHECK(lines.passed());
  CHECK(contains(lines.report, "kappa_theory: 5.50388"));
  CHECK(contains(lines.report, "r_theory: 0.904605"));
  CHECK(contains(lines.report, "kappa_hat: 5.50388"));
  CHECK(lines.files.count("steps.csv") == 1);
  CHECK(lines.files.count("regularity.csv") == 1);
  CHECK(lines.files.count("kl_check.csv") == 1);

  const auto rot = run_scenario(load_scenario("rotation_nonconvergence"), o);
  CHECK(rot.passed());
  CHECK(contains(rot.report, "no rate claim"));
  CHECK(contains(rot.report, "classification: never_certain"));
  CHECK(contains(rot.report, "mean_dist stays at 1.11803"));

  const auto disks = run_scenario(load_scenario("disks_rho_05"), o);
  CHECK(disks.passed());
  CHECK(contains(disks.files.at("feas_prob.csv"), "closed_form"));
  CHECK(contains(disks.report, "0.419569"));

  const auto ie = run_scenario(load_scenario("integral_differentiation"), o);
  CHECK(ie.files.count("solution.csv") == 1);
  CHECK(contains(ie.files.at("residuals.csv"), "iter,sup_res,l2_res\n0,"));
}

TEST_CASE("runner exit status follows assertions") {
  RunOptions o;
  o.write_files = false;
  auto sc = parse_scenario(std::string(kSmall) + "expect_classification = one_step\n");
  const auto r = run_scenario(sc, o);
  CHECK_FALSE(r.passed());
  CHECK(r.exit_code() == 1);
  CHECK(contains(r.report, "[FAIL] classification"));

  sc = parse_scenario(std::string(kSmall) + "expect_classification = never_certain\n");
  CHECK(run_scenario(sc, o).exit_code() == 0);
}

TEST_CASE("runs are deterministic across worker counts") {
  for (const auto& b : bundled_scenarios()) {
    CAPTURE(b.name);
    const auto sc = load_scenario(b.path);
    RunOptions one, many;
    one.write_files = many.write_files = false;
    one.threads = 1;
    many.threads = 8;
    const auto a = run_scenario(sc, one);
    const auto c = run_scenario(sc, many);
    CHECK(a.files == c.files);
  }
  RunOptions seeded;
  seeded.write_files = false;
  seeded.seed = 12345;
  const auto sc = load_scenario("lines_beta_pi2");
  CHECK(run_scenario(sc, seeded).files.at("steps.csv") != run_scenario(sc, {.write_files = false}).files.at("steps.csv"));
}
