#include "rfi/scenario.hpp"

#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rfi {
namespace {

const std::vector<std::string> kSections = {"scenario",    "problem",     "second_family", "initial",
                                            "ensemble",    "diagnostics", "integral_eq"};

const ConfigEntry& required(const ConfigSection& s, const char* key) {
  const auto* e = s.find(key);
  if (!e) throw ConfigError("[" + s.name + "] requires key '" + key + "'", s.line);
  return *e;
}

template <class F>
void with(const ConfigSection& s, const char* key, F&& f) {
  if (const auto* e = s.find(key)) f(*e);
}

std::size_t positive(const ConfigEntry& e) {
  const auto v = parse_u64(e);
  if (v < 1) throw ConfigError("'" + e.key + "' must be >= 1", e.line);
  return static_cast<std::size_t>(v);
}

InitialLaw parse_initial(const ConfigSection& s, Eigen::Index dim) {
  const auto& law = required(s, "law");
  auto check = [&](const Point& p, const ConfigEntry& e) {
    if (p.size() != dim) {
      throw ConfigError("'" + e.key + "' has dimension " + std::to_string(p.size()) + ", problem has " +
                            std::to_string(dim),
                        e.line);
    }
    return p;
  };
  if (law.value == "dirac") {
    s.require_keys({"law", "point"});
    const auto& e = required(s, "point");
    return InitialLaw::dirac(check(parse_point(e), e));
  }
  if (law.value == "uniform_box") {
    s.require_keys({"law", "lo", "hi"});
    const auto& lo = required(s, "lo");
    const auto& hi = required(s, "hi");
    try {
      return InitialLaw::uniform_box(check(parse_point(lo), lo), check(parse_point(hi), hi));
    } catch (const ConfigError& err) {
      if (err.line() != 0) throw;
      throw ConfigError(err.what(), lo.line);
    }
  }
  if (law.value == "gaussian") {
    s.require_keys({"law", "mean", "stddev"});
    const auto& m = required(s, "mean");
    const double sd = parse_real(required(s, "stddev"));
    if (!(sd > 0.0)) throw ConfigError("'stddev' must be > 0", required(s, "stddev").line);
    return InitialLaw::gaussian(check(parse_point(m), m), sd);
  }
  throw ConfigError("unknown initial law '" + law.value + "' (valid: dirac, uniform_box, gaussian)", law.line);
}

DiagnosticsSpec parse_diagnostics(const ConfigSection& s) {
  s.require_keys({"rate", "hitting", "classify", "fejer", "wasserstein", "limit_distance", "limit_ref",
                  "feas_prob_probes", "feas_prob_samples", "regularity_grid", "grid_radius", "grid_count",
                  "grid_offset", "grid_levels", "kl_check", "kl_kappa", "kl_radii", "kl_count", "kl_expect",
                  "merit_samples", "limit_tolerance", "expect_classification"});
  DiagnosticsSpec d;
  with(s, "rate", [&](const auto& e) { d.rate = parse_bool(e); });
  with(s, "hitting", [&](const auto& e) { d.hitting = parse_bool(e); });
  with(s, "classify", [&](const auto& e) { d.classify = parse_bool(e); });
  with(s, "fejer", [&](const auto& e) { d.fejer = parse_bool(e); });
  with(s, "wasserstein", [&](const auto& e) { d.wasserstein = parse_bool(e); });
  with(s, "limit_distance", [&](const auto& e) { d.limit_distance = parse_bool(e); });
  with(s, "limit_ref", [&](const auto& e) { d.limit_ref = positive(e); });
  with(s, "feas_prob_probes", [&](const auto& e) { d.feas_prob_probes = parse_point_list(e); });
  with(s, "feas_prob_samples", [&](const auto& e) { d.feas_prob_samples = positive(e); });
  with(s, "regularity_grid", [&](const auto& e) {
    if (e.value == "none") d.regularity_grid = ProbeGrid::none;
    else if (e.value == "circle") d.regularity_grid = ProbeGrid::circle;
    else if (e.value == "dyadic") d.regularity_grid = ProbeGrid::dyadic;
    else throw ConfigError("unknown regularity_grid '" + e.value + "' (valid: none, circle, dyadic)", e.line);
  });
  with(s, "grid_radius", [&](const auto& e) {
    d.grid_radius = parse_real(e);
    if (!(d.grid_radius > 0.0)) throw ConfigError("'grid_radius' must be > 0", e.line);
  });
  with(s, "grid_count", [&](const auto& e) { d.grid_count = positive(e); });
  with(s, "grid_offset", [&](const auto& e) { d.grid_offset = parse_real(e); });
  with(s, "grid_levels", [&](const auto& e) { d.grid_levels = positive(e); });
  with(s, "kl_check", [&](const auto& e) { d.kl_check = parse_bool(e); });
  with(s, "kl_kappa", [&](const auto& e) {
    d.kl_kappa = parse_real(e);
    if (!(*d.kl_kappa > 0.0)) throw ConfigError("'kl_kappa' must be > 0", e.line);
  });
  with(s, "kl_radii", [&](const auto& e) { d.kl_radii = parse_real_list(e); });
  with(s, "kl_count", [&](const auto& e) { d.kl_count = positive(e); });
  with(s, "kl_expect", [&](const auto& e) { d.kl_expect = parse_bool(e); });
  with(s, "merit_samples", [&](const auto& e) {
    d.merit_samples = positive(e);
    if (d.merit_samples < 2) throw ConfigError("'merit_samples' must be >= 2", e.line);
  });
  with(s, "limit_tolerance", [&](const auto& e) {
    d.limit_tolerance = parse_real(e);
    if (!(*d.limit_tolerance > 0.0)) throw ConfigError("'limit_tolerance' must be > 0", e.line);
  });
  with(s, "expect_classification", [&](const auto& e) {
    if (e.value == "one_step") d.expect_classification = Convergence::OneStep;
    else if (e.value == "never_certain") d.expect_classification = Convergence::NeverCertain;
    else throw ConfigError("unknown classification '" + e.value + "' (valid: one_step, never_certain)", e.line);
    d.classify = true;
  });
  return d;
}

IntegralEqSpec parse_integral_eq(const ConfigSection& s) {
  s.require_keys({"kernel", "rhs", "a", "b", "nodes", "iterations", "exact", "tolerance", "eval_from",
                  "history_stride"});
  IntegralEqSpec spec;
  const auto& kernel = required(s, "kernel");
  const auto& rhs = required(s, "rhs");
  auto known = [](const std::vector<std::string>& names, const ConfigEntry& e, const char* what) {
    if (std::find(names.begin(), names.end(), e.value) != names.end()) return e.value;
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError(std::string("unknown ") + what + " '" + e.value + "' (valid: " + list + ")", e.line);
  };
  spec.kernel = known(kernel_names(), kernel, "kernel");
  spec.rhs = known(rhs_names(), rhs, "rhs");
  with(s, "exact", [&](const auto& e) { spec.exact = known(rhs_names(), e, "exact solution"); });
  with(s, "a", [&](const auto& e) { spec.a = parse_real(e); });
  with(s, "b", [&](const auto& e) { spec.b = parse_real(e); });
  if (!(spec.a < spec.b)) throw ConfigError("integral_eq: need a < b", s.line);
  with(s, "nodes", [&](const auto& e) {
    spec.nodes = positive(e);
    if (spec.nodes < 2) throw ConfigError("'nodes' must be >= 2", e.line);
  });
  with(s, "iterations", [&](const auto& e) { spec.iterations = positive(e); });
  with(s, "tolerance", [&](const auto& e) { spec.tolerance = parse_real(e); });
  with(s, "eval_from", [&](const auto& e) { spec.eval_from = parse_real(e); });
  with(s, "history_stride", [&](const auto& e) { spec.history_stride = positive(e); });
  if (spec.tolerance && !spec.exact) throw ConfigError("integral_eq: tolerance needs an exact solution", s.line);
  return spec;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& default_name) {
  const ConfigDocument doc = parse_config(text);
  for (const auto& sec : doc.sections) {
    if (std::find(kSections.begin(), kSections.end(), sec.name) == kSections.end()) {
      std::string list;
      for (const auto& n : kSections) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError("unknown section [" + sec.name + "] (valid: " + list + ")", sec.line);
    }
  }

  Scenario sc;
  sc.name = default_name;
  for (const auto& h : doc.header) {
    if (h.rfind("Example:", 0) == 0) {
      sc.example = h.substr(8);
      if (!sc.example.empty() && sc.example.front() == ' ') sc.example.erase(0, 1);
    }
  }
  if (const auto* s = doc.find("scenario")) {
    s->require_keys({"name", "seed", "output", "retain_points"});
    with(*s, "name", [&](const auto& e) { sc.name = e.value; });
    with(*s, "seed", [&](const auto& e) { sc.seed = parse_u64(e); });
    with(*s, "output", [&](const auto& e) { sc.output = e.value; });
    with(*s, "retain_points", [&](const auto& e) { sc.retain_points = parse_bool(e); });
  }
  if (sc.output.empty()) sc.output = "out/" + sc.name;

  const auto* problem = doc.find("problem");
  const auto* second = doc.find("second_family");
  const auto* initial = doc.find("initial");
  const auto* ensemble = doc.find("ensemble");
  const auto* diagnostics = doc.find("diagnostics");
  const auto* integral = doc.find("integral_eq");

  if (!problem && !integral) throw ConfigError("scenario needs a [problem] or an [integral_eq] section");
  if (!problem) {
    for (const auto* s : {second, initial, ensemble, diagnostics}) {
      if (s) throw ConfigError("[" + s->name + "] requires a [problem] section", s->line);
    }
  }

  if (problem) {
    sc.problem = std::make_shared<BuiltProblem>(build_problem(*problem, second));
    if (!initial) throw ConfigError("[problem] requires an [initial] section", problem->line);
    if (!ensemble) throw ConfigError("[problem] requires an [ensemble] section", problem->line);
    sc.initial = parse_initial(*initial, sc.problem->dimension);
    ensemble->require_keys({"steps", "trajectories"});
    sc.steps = positive(required(*ensemble, "steps"));
    sc.trajectories = positive(required(*ensemble, "trajectories"));
    if (diagnostics) sc.diagnostics = parse_diagnostics(*diagnostics);
    auto& d = sc.diagnostics;
    if (d.limit_ref && *d.limit_ref > sc.steps) {
      throw ConfigError("'limit_ref' exceeds the number of steps", diagnostics->find("limit_ref")->line);
    }
    if (d.rate && sc.steps < 2) throw ConfigError("rate diagnostics need steps >= 2", ensemble->line);
    if (d.classify && sc.trajectories < 1000) {
      throw ConfigError("classification needs at least 1000 trajectories", ensemble->line);
    }
    for (const auto& p : d.feas_prob_probes) {
      if (p.size() != sc.problem->dimension) {
        throw ConfigError("feas_prob_probes: probe has wrong dimension", diagnostics->line);
      }
    }
    if (d.limit_tolerance && !sc.problem->limit_map) {
      throw ConfigError("limit_tolerance needs a family with a closed-form limit (hyperplanes)",
                        diagnostics->find("limit_tolerance")->line);
    }
    if (d.wasserstein || d.limit_distance || d.limit_tolerance) sc.retain_points = true;
  }
  if (integral) sc.integral_eq = parse_integral_eq(*integral);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (!fs::exists(p) && !p.has_parent_path() && !p.has_extension()) {
    const fs::path bundled = fs::path(RFI_SCENARIO_DIR) / (path + ".scn");
    if (fs::exists(bundled)) p = bundled;
  }
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), p.stem().string());
}

}  // namespace rfi
