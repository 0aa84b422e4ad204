#include "rfi/registry.hpp"

#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"
#include "rfi/merit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace rfi {
namespace {

double real_or(const ConfigSection& s, const char* key, double fallback) {
  const auto* e = s.find(key);
  return e ? parse_real(*e) : fallback;
}

const ConfigEntry& required(const ConfigSection& s, const char* key) {
  const auto* e = s.find(key);
  if (!e) throw ConfigError("[" + s.name + "] requires key '" + key + "'", s.line);
  return *e;
}

Point unit_vector(double angle) { return make_point({std::cos(angle), std::sin(angle)}); }

BuiltProblem halfspaces(const ConfigSection& s) {
  const double p1 = real_or(s, "p1", 0.3);
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("halfspaces: p1 must lie in [0,1]", s.line);
  const double p2 = 1.0 - p1;
  // C_1 = R_+ x R, C_2 = R x R_+ as { <n, x> <= 0 }.
  const Point n1 = make_point({-1.0, 0.0});
  const Point n2 = make_point({0.0, -1.0});
  std::vector<Point> normals;
  if (p1 > 0.0) normals.push_back(n1);
  if (p2 > 0.0) normals.push_back(n2);
  std::vector<double> offsets(normals.size(), 0.0);
  BuiltProblem b{Problem{IndexDistribution::finite({ops::HalfspaceProjector{n1, 0.0}, ops::HalfspaceProjector{n2, 0.0}},
                                                       {p1, p2}),
                             std::nullopt, FixedPointSet::halfspaces(2, std::move(normals), std::move(offsets)), 0.5}};
  b.dimension = 2;
  b.all_projectors = true;
  b.fejer = true;
  // From (-1,-1) the iterate is feasible once both projections have been applied.
  b.feas_frac_law = [p1, p2](std::size_t n) {
    if (n == 0) return 0.0;
    if (p1 == 1.0 || p2 == 1.0) return 1.0;
    return 1.0 - std::pow(p1, static_cast<double>(n)) - std::pow(p2, static_cast<double>(n));
  };
  b.feas_frac_law_start = make_point({-1.0, -1.0});
  return b;
}

BuiltProblem intervals(const ConfigSection& s) {
  const double eps = real_or(s, "eps", 0.1);
  if (!(eps >= 0.0 && eps < 0.5)) throw ConfigError("intervals: eps must lie in [0, 1/2)", s.line);
  BuiltProblem b{Problem{IndexDistribution::uniform(eps - 0.5, 0.5 - eps,
                                                        [](double r) -> OperatorSpec { return ops::IntervalProjector{r}; }),
                             std::nullopt, FixedPointSet::box(make_point({-eps}), make_point({eps})), 0.5}};
  b.dimension = 1;
  b.all_projectors = true;
  b.fejer = true;
  b.regular = eps > 0.0 ? std::optional<bool>(false) : std::nullopt;
  b.merit_closed = [eps](const Point& x) { return merit_closed_intervals(eps, x[0]); };
  b.grad_closed = [eps](const Point& x) { return make_point({grad_closed_intervals(eps, x[0])}); };
  return b;
}

BuiltProblem lines(const ConfigSection& s) {
  const double beta = real_or(s, "beta", std::numbers::pi / 2);
  if (!(beta > 0.0 && beta <= std::numbers::pi / 2)) throw ConfigError("lines: beta must lie in (0, pi/2]", s.line);
  BuiltProblem b{Problem{IndexDistribution::uniform(0.0, beta,
                                                        [](double a) -> OperatorSpec { return ops::LineProjector{a}; }),
                             std::nullopt, FixedPointSet::single_point(Point::Zero(2)), 0.5}};
  b.dimension = 2;
  b.all_projectors = true;
  b.fejer = true;
  b.regular = true;
  b.kappa_theory = kappa_closed_lines(beta);
  b.merit_closed = [beta](const Point& x) { return merit_closed_lines(beta, x); };
  b.grad_closed = [beta](const Point& x) { return grad_closed_lines(beta, x); };
  b.feas_prob_closed = [](const Point& x) { return x.norm() == 0.0 ? 1.0 : 0.0; };
  return b;
}

BuiltProblem disks(const ConfigSection& s) {
  const double rho = real_or(s, "rho", 0.5);
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("disks: rho must lie in (0,1)", s.line);
  BuiltProblem b{Problem{IndexDistribution::uniform(0.0, 2.0 * std::numbers::pi,
                                                        [rho](double a) -> OperatorSpec {
                                                          return ops::BallProjector{rho * unit_vector(a), 1.0};
                                                        }),
                             std::nullopt, FixedPointSet::ball(Point::Zero(2), 1.0 - rho), 0.5}};
  b.dimension = 2;
  b.all_projectors = true;
  b.fejer = true;
  b.regular = false;
  b.feas_prob_closed = [rho](const Point& x) { return disk_feasibility_closed(rho, x.norm()); };
  return b;
}

BuiltProblem rotation(const ConfigSection& s) {
  const double phi = real_or(s, "phi", std::numbers::pi / 2);
  BuiltProblem b{Problem{IndexDistribution::finite({ops::Rotation{phi}}, {1.0}), std::nullopt,
                             FixedPointSet::single_point(Point::Zero(2)), 0.5}};
  b.dimension = 2;
  b.fejer = true;
  b.norm_preserving = true;
  return b;
}

BuiltProblem hyperplanes(const ConfigSection& s) {
  const auto normals = parse_point_list(required(s, "normals"));
  const auto offsets = parse_real_list(required(s, "offsets"));
  if (normals.empty() || normals.size() != offsets.size()) {
    throw ConfigError("hyperplanes: need matching, nonempty normals and offsets", s.line);
  }
  std::vector<double> probs(normals.size(), 1.0 / static_cast<double>(normals.size()));
  if (const auto* e = s.find("probs")) probs = parse_real_list(*e);
  const Eigen::Index n = normals.front().size();
  Matrix A(static_cast<Eigen::Index>(normals.size()), n);
  Point rhs(static_cast<Eigen::Index>(normals.size()));
  std::vector<OperatorSpec> members;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (normals[i].size() != n) throw ConfigError("hyperplanes: normals differ in dimension", s.line);
    if (normals[i].norm() == 0.0) throw ConfigError("hyperplanes: zero normal", s.line);
    A.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
    rhs[static_cast<Eigen::Index>(i)] = offsets[i];
    members.push_back(ops::AffineHyperplaneProjector{normals[i], offsets[i]});
  }
  auto feasible = FixedPointSet::affine_from_equations(A, rhs);
  BuiltProblem b{Problem{IndexDistribution::finite(std::move(members), std::move(probs)), std::nullopt, feasible, 0.5}};
  b.dimension = n;
  b.all_projectors = true;
  b.fejer = true;
  b.limit_map = [feasible](const Point& x0) { return feasible.nearest(x0); };
  return b;
}

BuiltProblem huber(const ConfigSection& s) {
  const double alpha = real_or(s, "alpha", 1.0);
  if (!(alpha > 0.0)) throw ConfigError("huber: alpha must be > 0", s.line);
  BuiltProblem b{Problem{IndexDistribution::finite({ops::Huber{alpha}}, {1.0}), std::nullopt,
                             FixedPointSet::single_point(Point::Zero(1)), 0.5}};
  b.dimension = 1;
  b.fejer = true;
  return b;
}

BuiltProblem exp_prox(const ConfigSection& s) {
  const auto* e = s.find("dim");
  const auto dim = static_cast<Eigen::Index>(e ? parse_u64(*e) : 2);
  if (dim < 1) throw ConfigError("exp_prox: dim must be >= 1", s.line);
  BuiltProblem b{Problem{IndexDistribution::finite({ops::ExpQuasiconvexProx{}}, {1.0}), std::nullopt,
                             FixedPointSet::single_point(Point::Zero(dim)), 0.5}};
  b.dimension = dim;
  b.fejer = true;
  return b;
}

struct FamilyEntry {
  FamilyInfo info;
  BuiltProblem (*build)(const ConfigSection&);
};

const std::vector<FamilyEntry>& family_table() {
  static const std::vector<FamilyEntry> table = {
      {{"halfspaces", "finite and infinite convergence (two orthogonal halfspaces)", {"p1"}}, halfspaces},
      {{"intervals", "no uniform geometric convergence (overlapping intervals)", {"eps"}}, intervals},
      {{"lines", "uniform geometric convergence (lines through the origin)", {"beta"}}, lines},
      {{"disks", "disks on a circle", {"rho"}}, disks},
      {{"rotation", "nonexpansive mappings, negative result (rotation)", {"phi"}}, rotation},
      {{"hyperplanes", "convergence to projection for affine subspaces", {"normals", "offsets", "probs"}}, hyperplanes},
      {{"huber", "non-averaged paracontraction (Huber function)", {"alpha"}}, huber},
      {{"exp_prox", "non-averaged resolvent of a quasiconvex function", {"dim"}}, exp_prox},
  };
  return table;
}

}  // namespace

const std::vector<FamilyInfo>& builtin_families() {
  static const std::vector<FamilyInfo> infos = [] {
    std::vector<FamilyInfo> out;
    for (const auto& f : family_table()) out.push_back(f.info);
    return out;
  }();
  return infos;
}

BuiltProblem build_problem(const ConfigSection& section, const ConfigSection* second) {
  const auto& family_entry = required(section, "family");
  const auto& table = family_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const FamilyEntry& f) { return f.info.name == family_entry.value; });
  if (it == table.end()) {
    std::string names;
    for (const auto& f : table) names += (names.empty() ? "" : ", ") + f.info.name;
    throw ConfigError("unknown family '" + family_entry.value + "' (valid: " + names + ")", family_entry.line);
  }
  std::vector<std::string> keys = {"family", "alpha_bar"};
  keys.insert(keys.end(), it->info.keys.begin(), it->info.keys.end());
  section.require_keys(keys);

  BuiltProblem built = it->build(section);
  built.family = it->info.name;
  built.example = it->info.example;
  if (const auto* e = section.find("alpha_bar")) {
    built.problem.alpha_bar = parse_real(*e);
    // projections are exactly 1/2-averaged, whatever the index law
    if (built.all_projectors && built.problem.alpha_bar < 0.5) {
      throw ConfigError("alpha_bar is below the averaged constant 1/2 of a projection", e->line);
    }
    try {
      validate(built.problem);
    } catch (const ConfigError& err) {
      throw ConfigError(err.what(), e->line);
    }
  }

  if (second) {
    second->require_keys({"family", "target"});
    const auto& fam = required(*second, "family");
    if (fam.value != "point") {
      throw ConfigError("unknown second family '" + fam.value + "' (valid: point)", fam.line);
    }
    const Point target = parse_point(required(*second, "target"));
    if (target.size() != built.dimension) throw ConfigError("second family target has wrong dimension", second->line);
    built.problem.second_family = IndexDistribution::finite({ops::PointProjector{target}}, {1.0});
    // S_zeta T_xi has the single fixed point target, reached after one step.
    built.problem.feasible_set = FixedPointSet::single_point(target);
    built.family += "+point";
    built.example = "inconsistent stochastic feasibility (disks and a point)";
    built.kappa_theory.reset();
    built.regular.reset();
    built.merit_closed = nullptr;
    built.grad_closed = nullptr;
    built.feas_prob_closed = nullptr;
    built.feas_frac_law = nullptr;
    built.limit_map = nullptr;
    built.all_projectors = true;
  }
  return built;
}

std::vector<BundledScenario> bundled_scenarios(const std::string& dir) {
  std::vector<BundledScenario> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() != ".scn") continue;
    BundledScenario s{entry.path().stem().string(), entry.path().string(), ""};
    try {
      const auto doc = parse_config_file(s.path);
      for (const auto& h : doc.header) {
        if (h.rfind("Example:", 0) == 0) s.example = h.substr(8);
      }
    } catch (const ConfigError&) {
    }
    if (!s.example.empty() && s.example.front() == ' ') s.example.erase(0, 1);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::string list_builtin() {
  std::ostringstream out;
  out << "Operators:\n";
  const std::pair<const char*, const char*> operators[] = {
      {"interval_projector", "projector onto [r - 1/2, r + 1/2]"},
      {"line_projector", "projector onto R (cos a, sin a)"},
      {"ball_projector", "projector onto a closed ball"},
      {"halfspace_projector", "projector onto { <n,x> <= b }"},
      {"hyperplane_projector", "projector onto { <u,x> = b }"},
      {"point_projector", "projector onto a singleton"},
      {"identity", "identity map"},
      {"rotation", "rotation of R^2 (nonexpansive, not paracontractive)"},
      {"huber", "Huber function (paracontraction, not averaged)"},
      {"exp_prox", "prox of 1 - exp(-|x|^2) (paracontraction, not averaged)"},
      {"row_projector", "row constraint of a discretized integral equation"},
  };
  for (const auto& [name, what] : operators) out << "  " << std::left << std::setw(22) << name << what << "\n";
  out << "\nFamilies ([problem] family = ...):\n";
  for (const auto& f : builtin_families()) {
    out << "  " << std::left << std::setw(13) << f.name << f.example;
    if (!f.keys.empty()) {
      out << "  [keys:";
      for (const auto& k : f.keys) out << " " << k;
      out << "]";
    }
    out << "\n";
  }
  out << "  " << std::left << std::setw(13) << "point" << "[second_family] only: inconsistent stochastic feasibility  [keys: target]\n";
  out << "\nKernels ([integral_eq] kernel = ...):\n";
  out << "  indicator        K(t,s) = 1_[a,t](s)  -- differentiation as a first-kind equation\n";
  out << "  product_ts       K(t,s) = t s\n";
  out << "  gaussian_kernel  K(t,s) = exp(-(t-s)^2 / 0.02)\n";
  out << "\nRight-hand sides:";
  for (const auto& r : rhs_names()) out << " " << r;
  out << "\n\nBundled scenarios:\n";
  for (const auto& s : bundled_scenarios()) out << "  " << std::left << std::setw(26) << s.name << s.example << "\n";
  return out.str();
}

}  // namespace rfi
