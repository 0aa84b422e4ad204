#include "rfi/runner.hpp"

#include "rfi/diagnostics.hpp"
#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"
#include "rfi/merit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rfi {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string coord_header(Eigen::Index dim) {
  std::string h;
  for (Eigen::Index i = 0; i < dim; ++i) h += "x" + std::to_string(i) + ",";
  return h;
}

std::string coords(const Point& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += num(x[i]) + ",";
  return s;
}

// Stream ids for the diagnostic draws, far from the trajectory ids.
constexpr std::uint64_t kFeasProbStreams = kDiagnosticStreamBase;
constexpr std::uint64_t kMeritStreams = kDiagnosticStreamBase + (std::uint64_t{1} << 40);
constexpr std::uint64_t kIntegralStream = kDiagnosticStreamBase + (std::uint64_t{2} << 40);

std::vector<Point> circle_probes(Eigen::Index dim, double radius, std::size_t count, double offset) {
  std::vector<Point> probes;
  if (dim == 1) {
    probes.push_back(make_point({offset + radius}));
    probes.push_back(make_point({offset - radius}));
    return probes;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = offset + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    Point x = Point::Zero(dim);
    x[0] = radius * std::cos(t);
    x[1] = radius * std::sin(t);
    probes.push_back(std::move(x));
  }
  return probes;
}

std::vector<Point> dyadic_probes(Eigen::Index dim, double offset, std::size_t levels) {
  std::vector<Point> probes;
  for (std::size_t j = 1; j <= levels; ++j) {
    Point x = Point::Zero(dim);
    x[0] = offset + std::ldexp(1.0, -static_cast<int>(j));
    probes.push_back(std::move(x));
  }
  return probes;
}

class Runner {
 public:
  Runner(const Scenario& sc, const RunOptions& opt)
      : sc_(sc), opt_(opt), seed_(opt.seed.value_or(sc.seed)) {}

  RunResult run() {
    result_.out_dir = opt_.out_dir.value_or(sc_.output);
    out_ << "scenario: " << sc_.name << "\n";
    if (!sc_.example.empty()) out_ << "example: " << sc_.example << "\n";
    out_ << "seed: " << seed_ << "\n";
    if (sc_.problem) run_chain();
    if (sc_.integral_eq) run_integral_eq();

    out_ << "\nassertions:\n";
    if (result_.assertions.empty()) out_ << "  (none enabled)\n";
    for (const auto& a : result_.assertions) {
      out_ << "  [" << (a.passed ? "PASS" : "FAIL") << "] " << a.name;
      if (!a.detail.empty()) out_ << ": " << a.detail;
      out_ << "\n";
    }
    out_ << "status: " << (result_.passed() ? "PASS" : "FAIL") << "\n";
    result_.report = out_.str();
    result_.files["report.txt"] = result_.report;
    if (opt_.write_files) write();
    return std::move(result_);
  }

 private:
  void check(std::string name, bool passed, std::string detail = {}) {
    result_.assertions.push_back({std::move(name), passed, std::move(detail)});
  }

  const BuiltProblem& built() const { return *sc_.problem; }
  const DiagnosticsSpec& diag() const { return sc_.diagnostics; }

  MeritEvaluator merit_evaluator() {
    if (built().merit_closed) return built().merit_closed;
    return [this](const Point& x) {
      RngStream rng(seed_, kMeritStreams + merit_calls_++);
      return merit_mc(built().problem, x, diag().merit_samples, rng).value;
    };
  }

  GradientEvaluator gradient_evaluator() {
    if (built().grad_closed) return built().grad_closed;
    return [this](const Point& x) {
      RngStream rng(seed_, kMeritStreams + merit_calls_++);
      return grad_R(built().problem, x, diag().merit_samples, rng);
    };
  }

  void run_chain() {
    const auto& b = built();
    const auto& d = diag();
    out_ << "family: " << b.family << " (dimension " << b.dimension << ")\n";
    out_ << "feasible set: " << b.problem.feasible_set.describe() << "\n";
    out_ << "trajectories: " << sc_.trajectories << ", steps: " << sc_.steps << "\n";

    EnsembleOptions eo;
    eo.steps = sc_.steps;
    eo.trajectories = sc_.trajectories;
    eo.base_seed = seed_;
    eo.threads = std::max(1u, opt_.threads);
    eo.retain_points = sc_.retain_points;
    const Ensemble ens = run_ensemble(b.problem, *sc_.initial, eo);
    const std::size_t K = sc_.steps;

    out_ << "\nregularity:\n";
    if (b.kappa_theory) {
      out_ << "  kappa_theory: " << brief(*b.kappa_theory) << "\n";
      out_ << "  r_theory: " << brief(rate_bound(*b.kappa_theory, b.problem.alpha_bar)) << "\n";
    } else if (b.regular == std::optional<bool>(false)) {
      out_ << "  kappa_theory: none (regularity fails for every kappa)\n";
    } else {
      out_ << "  kappa_theory: not registered\n";
    }
    std::optional<double> kappa_hat;
    if (d.regularity_grid != ProbeGrid::none) kappa_hat = run_regularity();

    // Rate claim: empirical regularity estimate when it looks finite, otherwise the closed form.
    std::optional<double> r_use;
    if (kappa_hat) r_use = rate_bound(*kappa_hat, b.problem.alpha_bar);
    else if (b.kappa_theory) r_use = rate_bound(*b.kappa_theory, b.problem.alpha_bar);

    std::vector<std::string> ratio_col(K + 1), se_col(K + 1), law_col(K + 1), w1_col(K + 1), lim_col(K + 1);

    if (d.rate) {
      out_ << "\nrate:\n";
      try {
        const RateCurve rc = empirical_rate(ens, r_use);
        for (std::size_t i = 0; i < rc.ratios.size(); ++i) {
          ratio_col[rc.steps[i]] = num(rc.ratios[i]);
          se_col[rc.steps[i]] = num(rc.std_errors[i]);
        }
        if (r_use) {
          out_ << "  r_bound: " << brief(*r_use) << "\n";
          double worst = 0.0;
          for (double r : rc.ratios) worst = std::max(worst, r);
          out_ << "  max empirical ratio: " << brief(worst) << "\n";
          out_ << "  flagged steps: " << rc.flagged.size() << "\n";
          std::string detail = std::to_string(rc.flagged.size()) + " ratio(s) above r + 3 SE";
          if (!rc.flagged.empty()) detail += ", first at k=" + std::to_string(rc.flagged.front());
          check("rate ratios within bound", rc.flagged.empty(), detail);
        } else {
          out_ << "  no rate claim (no regularity constant)\n";
        }
      } catch (const DegenerateError& e) {
        out_ << "  no rate curve: " << e.what() << "\n";
      }
    }

    if (b.norm_preserving) {
      double dev = 0.0;
      for (double m : ens.mean_dist) dev = std::max(dev, std::abs(m - ens.mean_dist[0]));
      out_ << "\nnorm preservation: mean_dist stays at " << brief(ens.mean_dist[0]) << " (max deviation "
           << brief(dev) << ")\n";
      check("mean_dist constant", dev <= 1e-12 * std::max(1.0, ens.mean_dist[0]), "max deviation " + brief(dev));
    }

    if (b.feas_frac_law && b.feas_frac_law_start && sc_.initial->is_dirac() &&
        std::get<laws::Dirac>(sc_.initial->variant()).point == *b.feas_frac_law_start) {
      std::size_t bad = 0;
      double worst = 0.0;
      const double m = static_cast<double>(sc_.trajectories);
      for (std::size_t n = 0; n <= K; ++n) {
        const double p = b.feas_frac_law(n);
        law_col[n] = num(p);
        if (n == 0) continue;
        const double se = std::sqrt(p * (1.0 - p) / m);
        const double z = std::abs(ens.feas_frac[n] - p);
        worst = std::max(worst, se > 0.0 ? z / se : (z > 0.0 ? INFINITY : 0.0));
        if (z > 3.0 * se + 1e-12) ++bad;
      }
      out_ << "\nfeasibility law: max |feas_frac - law| = " << brief(worst) << " SE\n";
      check("feas_frac matches closed-form law", bad == 0, std::to_string(bad) + " step(s) outside 3 SE");
    }

    if (d.hitting) {
      const HittingStats hs = hitting_stats(ens);
      std::ostringstream csv;
      csv << "k,fraction_hit\n";
      for (std::size_t k = 0; k < hs.fraction_hit.size(); ++k) csv << k << "," << num(hs.fraction_hit[k]) << "\n";
      result_.files["hitting.csv"] = csv.str();
      out_ << "\nhitting: " << hs.hitters << " of " << sc_.trajectories << " trajectories reached C";
      if (hs.mean_hitting_time) out_ << ", mean hitting time " << brief(*hs.mean_hitting_time);
      out_ << "\n";
    }

    if (d.classify) {
      const Classification c = classify_finite_infinite(ens);
      const char* kind = c.kind == Convergence::OneStep ? "one_step" : "never_certain";
      out_ << "\nclassification: " << kind;
      if (c.contradiction) out_ << " (contradiction at k=" << *c.contradiction_step << ")";
      out_ << "\n";
      if (d.expect_classification) {
        const char* want = *d.expect_classification == Convergence::OneStep ? "one_step" : "never_certain";
        check("classification", c.kind == *d.expect_classification && !c.contradiction,
              std::string("got ") + kind + ", expected " + want);
      }
    }

    if (d.fejer) {
      std::size_t violations = 0;
      for (const auto& t : ens.trajectories) {
        for (std::size_t k = 0; k + 1 < t.dists.size(); ++k) {
          if (t.dists[k + 1] > t.dists[k] + 1e-12 * std::max(1.0, t.dists[k])) {
            ++violations;
            break;
          }
        }
      }
      out_ << "\nfejer: " << violations << " trajectory(ies) with an increase of dist(X_k, C)\n";
      if (b.fejer) check("fejer monotone", violations == 0, std::to_string(violations) + " violating trajectories");
    }

    const std::size_t k_ref = d.limit_ref.value_or(K);
    std::vector<double> limit;
    if (d.limit_distance || d.wasserstein) {
      limit = limit_distance_curve(ens, k_ref);
      for (std::size_t k = 0; k < limit.size(); ++k) lim_col[k] = num(limit[k]);
    }
    if (d.limit_distance && b.fejer) {
      std::size_t bad = 0;
      for (std::size_t k = 0; k < limit.size(); ++k) {
        if (limit[k] > 2.0 * ens.mean_dist[k] + 1e-9) ++bad;
      }
      out_ << "\nlimit proxy: mean |X_k - X_" << k_ref << "| at k=0 is " << brief(limit[0]) << "\n";
      check("limit proxy within 2 mean_dist", bad == 0, std::to_string(bad) + " step(s) above bound");
    }
    if (d.wasserstein) {
      const auto w1 = wasserstein_curve(ens, k_ref);
      std::size_t bad = 0;
      for (std::size_t k = 0; k < w1.size(); ++k) {
        w1_col[k] = num(w1[k]);
        if (w1[k] > limit[k] + 1e-12) ++bad;
      }
      out_ << "\nwasserstein: W1(X_0, X_" << k_ref << ") = " << brief(w1[0]) << "\n";
      check("W1 below coupling bound", bad == 0, std::to_string(bad) + " step(s) above coupling");
    }

    if (d.limit_tolerance) {
      if (!b.limit_map) throw ConfigError("limit_tolerance needs a family with a closed-form limit");
      double worst = 0.0;
      for (const auto& t : ens.trajectories) worst = std::max(worst, (t.final - b.limit_map(t.initial)).norm());
      out_ << "\nlimit: max |X_K - P_C X_0| = " << brief(worst) << "\n";
      check("limit matches projection", worst <= *d.limit_tolerance,
            "max error " + brief(worst) + " vs tolerance " + brief(*d.limit_tolerance));
    }

    if (!d.feas_prob_probes.empty()) run_feas_prob();
    if (d.kl_check) run_kl(kappa_hat);

    std::ostringstream csv;
    csv << "k,mean_dist,ratio,ratio_se,feas_frac,feas_law,w1,limit_dist\n";
    for (std::size_t k = 0; k <= K; ++k) {
      csv << k << "," << num(ens.mean_dist[k]) << "," << ratio_col[k] << "," << se_col[k] << ","
          << num(ens.feas_frac[k]) << "," << law_col[k] << "," << w1_col[k] << "," << lim_col[k] << "\n";
    }
    result_.files["steps.csv"] = csv.str();
    out_ << "\nfinal mean_dist: " << brief(ens.mean_dist[K]) << ", final feas_frac: " << brief(ens.feas_frac[K])
         << "\n";
  }

  std::optional<double> run_regularity() {
    const auto& b = built();
    const auto& d = diag();
    const auto probes = d.regularity_grid == ProbeGrid::circle
                            ? circle_probes(b.dimension, d.grid_radius, d.grid_count, d.grid_offset)
                            : dyadic_probes(b.dimension, d.grid_offset, d.grid_levels);
    // Evaluate each merit once; the report and the CSV share the values.
    const auto eval = merit_evaluator();
    std::vector<std::optional<double>> merits(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (b.problem.feasible_set.dist(probes[i]) > kMembershipTol) merits[i] = eval(probes[i]);
    }
    const auto cached = [&](const Point& x) {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        if (merits[i] && probes[i] == x) return *merits[i];
      }
      return eval(x);
    };
    const RegularityReport rep = regularity_constant(b.problem, probes, cached);

    std::ostringstream csv;
    csv << coord_header(b.dimension) << "dist,merit,ratio\n";
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double dist = b.problem.feasible_set.dist(probes[i]);
      csv << coords(probes[i]) << num(dist) << ",";
      if (merits[i]) csv << num(*merits[i]) << "," << num(dist * dist / *merits[i]);
      else csv << ",";
      csv << "\n";
    }
    result_.files["regularity.csv"] = csv.str();

    out_ << "  kappa_hat: " << brief(rep.kappa_hat) << " over " << rep.probes_used << " probe(s) ("
         << rep.probes_skipped << " in C) via " << (b.merit_closed ? "closed-form" : "Monte Carlo") << " merit\n";
    out_ << "  coarse kappa_hat: " << brief(rep.coarse_kappa_hat) << "\n";
    if (rep.divergence_flag) out_ << "  divergence: kappa_hat grows without bound toward C\n";

    if (b.regular == std::optional<bool>(false)) {
      check("regularity fails", rep.divergence_flag,
            "kappa_hat " + brief(rep.kappa_hat) + " vs coarse " + brief(rep.coarse_kappa_hat));
      return std::nullopt;
    }
    if (rep.divergence_flag || rep.probes_used == 0) return std::nullopt;
    if (b.kappa_theory && b.merit_closed) {
      const double rel = std::abs(rep.kappa_hat - *b.kappa_theory) / *b.kappa_theory;
      check("kappa_hat matches closed form", rel <= 0.01 && rep.kappa_hat <= *b.kappa_theory * (1.0 + 1e-9),
            "kappa_hat " + brief(rep.kappa_hat) + ", closed form " + brief(*b.kappa_theory));
    }
    if (rep.kappa_hat * b.problem.alpha_bar < 1.0 - b.problem.alpha_bar) return std::nullopt;
    return rep.kappa_hat;
  }

  void run_feas_prob() {
    const auto& b = built();
    const auto& d = diag();
    std::ostringstream csv;
    csv << coord_header(b.dimension) << "p_hat,std_error,n,closed_form\n";
    out_ << "\nfeasibility probability:\n";
    out_ << "  probe            p_hat        SE           closed form\n";
    std::size_t bad = 0;
    for (std::size_t i = 0; i < d.feas_prob_probes.size(); ++i) {
      RngStream rng(seed_, kFeasProbStreams + i);
      FeasProbReport rep = feasibility_probability(b.problem.family, d.feas_prob_probes[i], d.feas_prob_samples, rng);
      if (b.feas_prob_closed) rep.closed_form = b.feas_prob_closed(rep.probe);
      csv << coords(rep.probe) << num(rep.p_hat) << "," << num(rep.std_error) << "," << rep.n_samples << ","
          << (rep.closed_form ? num(*rep.closed_form) : "") << "\n";
      char line[160];
      std::snprintf(line, sizeof line, "  %-16s %-12.6g %-12.3g %s\n", format_point(rep.probe).c_str(), rep.p_hat,
                    rep.std_error, rep.closed_form ? brief(*rep.closed_form).c_str() : "-");
      out_ << line;
      if (rep.closed_form) {
        const double p = *rep.closed_form;
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(rep.n_samples));
        if (std::abs(rep.p_hat - p) > 3.0 * se + 1e-12) ++bad;
      }
    }
    result_.files["feas_prob.csv"] = csv.str();
    if (b.feas_prob_closed) {
      check("feasibility probability matches closed form", bad == 0,
            std::to_string(bad) + " probe(s) outside 3 SE");
    }
  }

  void run_kl(std::optional<double> kappa_hat) {
    const auto& b = built();
    const auto& d = diag();
    std::optional<double> kappa = d.kl_kappa;
    if (!kappa) kappa = b.kappa_theory ? b.kappa_theory : kappa_hat;
    if (!kappa) throw ConfigError("kl_check needs kl_kappa or a regularity constant");
    std::vector<Point> probes;
    for (double r : d.kl_radii) {
      for (auto& p : circle_probes(b.dimension, r, d.kl_count, d.grid_offset)) probes.push_back(std::move(p));
    }
    const auto merit = merit_evaluator();
    const auto grad = gradient_evaluator();
    std::vector<double> rv, gv;
    const auto rec_merit = [&](const Point& x) {
      rv.push_back(merit(x));
      return rv.back();
    };
    const auto rec_grad = [&](const Point& x) {
      Point g = grad(x);
      gv.push_back(g.norm());
      return g;
    };
    const KlReport rep = kl_check(probes, *kappa, rec_merit, rec_grad);
    std::ostringstream csv;
    csv << coord_header(b.dimension) << "merit,grad_norm,slack\n";
    for (std::size_t i = 0; i < probes.size(); ++i) {
      csv << coords(probes[i]) << num(rv[i]) << "," << num(gv[i]) << "," << num(rep.slack[i]) << "\n";
    }
    result_.files["kl_check.csv"] = csv.str();
    out_ << "\nKL check with kappa " << brief(*kappa) << ": worst slack " << brief(rep.worst_slack) << " at "
         << format_point(rep.worst_probe) << "\n";
    check(d.kl_expect ? "KL inequality holds" : "KL inequality fails", rep.all_pass == d.kl_expect,
          "worst slack " + brief(rep.worst_slack));
  }

  void run_integral_eq() {
    const auto& spec = *sc_.integral_eq;
    const auto prob = discretize(make_kernel(spec.kernel, spec.a, spec.b), make_rhs(spec.rhs), spec.a, spec.b,
                                 static_cast<Eigen::Index>(spec.nodes));
    const SweepResult res = solve_random_sweep(prob, Point::Zero(prob.size()), spec.iterations,
                                               RngStream(seed_, kIntegralStream).next_u64());
    out_ << "\nintegral equation: kernel " << spec.kernel << ", rhs " << spec.rhs << ", " << spec.nodes
         << " nodes on [" << brief(spec.a) << ", " << brief(spec.b) << "], " << spec.iterations
         << " row projections\n";
    out_ << "  usable rows: " << prob.usable_rows() << ", redraws: " << res.redraws << "\n";

    std::optional<RhsFn> exact;
    if (spec.exact) exact = make_rhs(*spec.exact);
    std::ostringstream sol;
    sol << "s,value,exact,error\n";
    double sup_err = 0.0;
    for (Eigen::Index j = 0; j < prob.size(); ++j) {
      const double s = prob.grid[j];
      sol << num(s) << "," << num(res.solution[j]) << ",";
      if (exact) {
        const double e = (*exact)(s);
        const double err = std::abs(res.solution[j] - e);
        if (s >= spec.eval_from - 1e-12) sup_err = std::max(sup_err, err);
        sol << num(e) << "," << num(err);
      } else {
        sol << ",";
      }
      sol << "\n";
    }
    result_.files["solution.csv"] = sol.str();

    std::ostringstream resid;
    resid << "iter,sup_res,l2_res\n";
    const auto& h = res.history;
    for (std::size_t k = 0; k < h.sup_norm.size(); k += spec.history_stride) {
      resid << k << "," << num(h.sup_norm[k]) << "," << num(h.l2_norm[k]) << "\n";
    }
    if ((h.sup_norm.size() - 1) % spec.history_stride != 0) {
      const std::size_t k = h.sup_norm.size() - 1;
      resid << k << "," << num(h.sup_norm[k]) << "," << num(h.l2_norm[k]) << "\n";
    }
    result_.files["residuals.csv"] = resid.str();
    out_ << "  final residual: sup " << brief(h.sup_norm.back()) << ", weighted L2 " << brief(h.l2_norm.back())
         << "\n";
    if (exact) {
      out_ << "  sup error on s >= " << brief(spec.eval_from) << ": " << brief(sup_err) << "\n";
      if (spec.tolerance) {
        check("integral equation sup error", sup_err <= *spec.tolerance,
              brief(sup_err) + " vs tolerance " + brief(*spec.tolerance));
      }
    } else if (spec.tolerance) {
      throw ConfigError("integral_eq: tolerance needs an exact solution");
    }
  }

  void write() {
    namespace fs = std::filesystem;
    const fs::path dir(result_.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + result_.out_dir + "': " + ec.message());
    for (const auto& [name, content] : result_.files) {
      std::ofstream f(dir / name, std::ios::binary);
      f << content;
      if (!f) throw Error("cannot write '" + (dir / name).string() + "'");
    }
  }

  const Scenario& sc_;
  const RunOptions& opt_;
  std::uint64_t seed_;
  std::uint64_t merit_calls_ = 0;
  std::ostringstream out_;
  RunResult result_;
};

}  // namespace

bool RunResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  return Runner(scenario, options).run();
}

}  // namespace rfi
