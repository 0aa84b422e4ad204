// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Thresholds are fixed here.
#include "rfi/chain.hpp"
#include "rfi/diagnostics.hpp"
#include "rfi/errors.hpp"
#include "rfi/integral_eq.hpp"
#include "rfi/merit.hpp"
#include "rfi/operators.hpp"
#include "rfi/registry.hpp"
#include "rfi/runner.hpp"
#include "rfi/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace rfi;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
    passed = passed && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Problem halfspaces(double p1) {
  const Point n1 = make_point({-1.0, 0.0}), n2 = make_point({0.0, -1.0});
  return {IndexDistribution::finite({ops::HalfspaceProjector{n1, 0.0}, ops::HalfspaceProjector{n2, 0.0}},
                                    {p1, 1.0 - p1}),
          std::nullopt, FixedPointSet::halfspaces(2, {n1, n2}, {0.0, 0.0}), 0.5};
}

Problem lines(double beta) {
  return {IndexDistribution::uniform(0.0, beta, [](double a) -> OperatorSpec { return ops::LineProjector{a}; }),
          std::nullopt, FixedPointSet::single_point(Point::Zero(2)), 0.5};
}

Problem intervals(double eps) {
  return {IndexDistribution::uniform(eps - 0.5, 0.5 - eps,
                                     [](double r) -> OperatorSpec { return ops::IntervalProjector{r}; }),
          std::nullopt, FixedPointSet::box(make_point({-eps}), make_point({eps})), 0.5};
}

Problem disks(double rho) {
  return {IndexDistribution::uniform(0.0, 2.0 * kPi,
                                     [rho](double t) -> OperatorSpec {
                                       return ops::BallProjector{rho * make_point({std::cos(t), std::sin(t)}), 1.0};
                                     }),
          std::nullopt, FixedPointSet::ball(Point::Zero(2), 1.0 - rho), 0.5};
}

Point random_point(RngStream& rng, Eigen::Index n, double lo, double hi) {
  Point x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

// ---------------------------------------------------------------------------

Outcome halfspace_law() {
  Outcome o;
  EnsembleOptions eo;
  eo.steps = 10;
  eo.trajectories = 100000;
  eo.base_seed = 1;
  const auto ens = run_ensemble(halfspaces(0.3), InitialLaw::dirac(make_point({-1.0, -1.0})), eo);
  double worst = 0.0;
  bool ok = true;
  for (std::size_t n = 1; n <= 10; ++n) {
    const double p = 1.0 - std::pow(0.3, double(n)) - std::pow(0.7, double(n));
    const double se = std::sqrt(p * (1.0 - p) / double(eo.trajectories));
    const double dev = std::abs(ens.feas_frac[n] - p);
    // at n = 1 the law is degenerate (p = 0) and the fraction must match exactly
    ok = ok && dev <= 3.0 * se + 1e-12;
    if (se > 0.0) worst = std::max(worst, dev / se);
  }
  o.require(ok, "max |feas_frac[n] - (1 - 0.3^n - 0.7^n)| = " + fmt("%.3f", worst) + " SE (limit 3)");
  return o;
}

Outcome lines_rate() {
  Outcome o;
  const auto p = lines(kPi / 2);
  std::vector<Point> probes;
  for (int i = 0; i < 10000; ++i) {
    const double t = 2.0 * kPi * i / 10000.0;
    probes.push_back(make_point({std::cos(t), std::sin(t)}));
  }
  const auto rep = regularity_constant(p, probes, [](const Point& x) { return merit_closed_lines(kPi / 2, x); });
  const double target = 11.0063;
  const double rel = std::abs(rep.kappa_hat - target) / target;
  o.require(rel <= 0.005, "kappa_hat = " + fmt("%.6f", rep.kappa_hat) + " vs 11.0063 +- 0.5% (off by " +
                              fmt("%.2f", 100 * rel) + "%)");

  const double r = rate_bound(rep.kappa_hat, 0.5);
  EnsembleOptions eo;
  eo.steps = 60;
  eo.trajectories = 10000;
  eo.base_seed = 2;
  const auto ens = run_ensemble(p, InitialLaw::uniform_box(make_point({-1.0, -1.0}), make_point({1.0, 1.0})), eo);
  const auto rc = empirical_rate(ens, r);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < rc.ratios.size(); ++i) {
    if (rc.mean_dist[rc.steps[i]] > 100.0 * kMembershipTol) {
      worst = std::max(worst, rc.ratios[i] - r - 3.0 * rc.std_errors[i]);
      ++checked;
    }
  }
  o.require(rc.flagged.empty() && checked > 0,
            std::to_string(checked) + " ratios <= rate_bound(kappa_hat, 1/2) = " + fmt("%.5f", r) +
                " + 3 SE (worst excess " + fmt("%.4f", worst) + ")");
  return o;
}

Outcome intervals_irregular() {
  Outcome o;
  const double eps = 0.1;
  const auto p = intervals(eps);
  std::vector<double> kappas;
  std::vector<Point> probes;
  for (int j = 1; j <= 20; ++j) {
    probes.push_back(make_point({eps + std::ldexp(1.0, -j)}));
    const auto rep = regularity_constant(p, probes, [eps](const Point& x) { return merit_closed_intervals(eps, x[0]); });
    kappas.push_back(rep.kappa_hat);
  }
  double min_growth = INFINITY;
  for (std::size_t j = 1; j < kappas.size(); ++j) min_growth = std::min(min_growth, kappas[j] / kappas[j - 1]);
  o.require(min_growth >= 1.8, "successive kappa_hat ratio >= " + fmt("%.4f", min_growth) + " (limit 1.8), kappa_hat(20) = " +
                                   fmt("%.4g", kappas.back()));
  return o;
}

Outcome disk_feasibility() {
  Outcome o;
  const auto fam = disks(0.5).family;
  std::uint64_t stream = 0;
  for (double lam : {0.6, 0.8, 1.0, 1.2}) {
    RngStream rng(4, stream++);
    const auto rep = feasibility_probability(fam, make_point({lam, 0.0}), 100000, rng);
    const double closed = disk_feasibility_closed(0.5, lam);
    const double sigma = std::sqrt(closed * (1.0 - closed) / 100000.0);
    o.require(std::abs(rep.p_hat - closed) <= 3.0 * sigma,
              "lambda " + fmt("%.2f", lam) + ": p_hat " + fmt("%.5f", rep.p_hat) + " vs beta/pi " + fmt("%.5f", closed));
  }
  RngStream rng(4, stream);
  const auto near = feasibility_probability(fam, make_point({0.51, 0.0}), 100000, rng);
  o.require(near.p_hat > 0.95, "lambda 0.51: p_hat " + fmt("%.5f", near.p_hat) + " > 0.95 (closed form " +
                                   fmt("%.5f", disk_feasibility_closed(0.5, 0.51)) + ")");
  return o;
}

Outcome merit_calculus() {
  Outcome o;
  RngStream probes(5, 0);
  std::uint64_t stream = 1;
  const std::size_t n = 20000;

  int bad_int = 0, bad_lines = 0;
  for (int i = 0; i < 100; ++i) {
    const Point x = make_point({probes.uniform(-1.5, 1.5)});
    RngStream rng(5, stream++);
    const auto m = merit_mc(intervals(0.1), x, n, rng);
    if (std::abs(m.value - merit_closed_intervals(0.1, x[0])) > 4.0 * m.std_error) ++bad_int;
    const Point y = random_point(probes, 2, -2.0, 2.0);
    RngStream rng2(5, stream++);
    const auto ml = merit_mc(lines(kPi / 2), y, n, rng2);
    if (std::abs(ml.value - merit_closed_lines(kPi / 2, y)) > 4.0 * ml.std_error) ++bad_lines;
  }
  o.require(bad_int == 0, "intervals merit_mc within 4 SE on 100 probes (" + std::to_string(bad_int) + " outside)");
  o.require(bad_lines == 0, "lines merit_mc within 4 SE on 100 probes (" + std::to_string(bad_lines) + " outside)");

  const double h = 1e-5;
  const std::size_t ng = 4000;
  int bad_fd = 0;
  double worst_fd = 0.0;
  for (int fam = 0; fam < 2; ++fam) {
    const Problem p = fam == 0 ? intervals(0.1) : lines(kPi / 2);
    const Eigen::Index dim = fam == 0 ? 1 : 2;
    for (int i = 0; i < 100; ++i) {
      const Point x = random_point(probes, dim, -2.0, 2.0);
      const std::uint64_t s = stream++;
      RngStream g_rng(5, s);
      const Point g = grad_R(p, x, ng, g_rng);
      RngStream se_rng(5, s);
      Point s1 = Point::Zero(dim), s2 = Point::Zero(dim);
      for (std::size_t k = 0; k < ng; ++k) {
        const Point v = 2.0 * (x - apply(sample_index(p.family, se_rng).op, x));
        s1 += v;
        s2 += v.cwiseProduct(v);
      }
      for (Eigen::Index j = 0; j < dim; ++j) {
        Point e = Point::Zero(dim);
        e[j] = h;
        RngStream a(5, s), b(5, s);
        const double fd = (merit_mc(p, x + e, ng, a).value - merit_mc(p, x - e, ng, b).value) / (2.0 * h);
        const double var = std::max(0.0, (s2[j] - s1[j] * s1[j] / double(ng)) / double(ng - 1));
        const double tol = std::max(1e-4, 5.0 * std::sqrt(var / double(ng)));
        worst_fd = std::max(worst_fd, std::abs(fd - g[j]));
        if (std::abs(fd - g[j]) > tol) ++bad_fd;
      }
    }
  }
  o.require(bad_fd == 0, "grad_R vs central differences (common random numbers) within max(1e-4, 5 SE), worst " +
                             fmt("%.2e", worst_fd));

  double worst_lip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point x = random_point(probes, 2, -3.0, 3.0), y = random_point(probes, 2, -3.0, 3.0);
    worst_lip = std::max(worst_lip, (grad_closed_lines(kPi / 2, x) - grad_closed_lines(kPi / 2, y)).norm() / (x - y).norm());
    const double a = probes.uniform(-2.0, 2.0), b = probes.uniform(-2.0, 2.0);
    worst_lip = std::max(worst_lip, std::abs(grad_closed_intervals(0.1, a) - grad_closed_intervals(0.1, b)) / std::abs(a - b));
    // Monte Carlo gradient of the disk family with shared draws
    const std::uint64_t s = stream++;
    RngStream ga(5, s), gb(5, s);
    const Point u = random_point(probes, 2, -2.0, 2.0), v = random_point(probes, 2, -2.0, 2.0);
    worst_lip = std::max(worst_lip, (grad_R(disks(0.5), u, 200, ga) - grad_R(disks(0.5), v, 200, gb)).norm() / (u - v).norm());
  }
  o.require(worst_lip <= 4.0 + 1e-6, "gradient Lipschitz ratio " + fmt("%.4f", worst_lip) + " <= 4 on 1000 pairs");
  return o;
}

Outcome affine_limit() {
  Outcome o;
  RngStream rng(6, 0);
  // two random hyperplanes in R^3; their normals are independent almost surely
  const Point u1 = random_point(rng, 3, -1.0, 1.0), u2 = random_point(rng, 3, -1.0, 1.0);
  const double b1 = rng.uniform(-1.0, 1.0), b2 = rng.uniform(-1.0, 1.0);
  Matrix A(2, 3);
  A.row(0) = u1.transpose();
  A.row(1) = u2.transpose();
  const Point b = make_point({b1, b2});
  const double cos_angle = std::abs(u1.normalized().dot(u2.normalized()));
  const double sin_angle = std::sqrt(std::max(0.0, 1.0 - cos_angle * cos_angle));
  Problem p{IndexDistribution::finite({ops::AffineHyperplaneProjector{u1, b1}, ops::AffineHyperplaneProjector{u2, b2}},
                                      {0.5, 0.5}),
            std::nullopt, FixedPointSet::affine_from_equations(A, b), 0.5};
  EnsembleOptions eo;
  eo.steps = 500;
  eo.trajectories = 100;
  eo.base_seed = 6;
  const auto ens = run_ensemble(p, InitialLaw::gaussian(Point::Zero(3), 3.0), eo);
  double worst = 0.0;
  for (const auto& t : ens.trajectories) {
    // closed-form projection onto { A x = b }
    const Point proj = t.initial - A.transpose() * (A * A.transpose()).ldlt().solve(A * t.initial - b);
    worst = std::max(worst, (t.final - proj).norm());
  }
  o.require(worst <= 1e-6, "max |X_500 - P_C X_0| = " + fmt("%.3e", worst) + " over 100 starts (sin angle " +
                               fmt("%.3f", sin_angle) + ")");
  return o;
}

Outcome integral_equation() {
  Outcome o;
  const auto p = discretize(make_kernel("indicator", 0.0, 1.0), make_rhs("half_square"), 0.0, 1.0, 201);
  const auto res = solve_random_sweep(p, Point::Zero(201), 200000, 7);
  double sup_err = 0.0, worst_at = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p.grid[j] >= 0.05 - 1e-12) {
      const double e = std::abs(res.solution[j] - p.grid[j]);
      if (e > sup_err) {
        sup_err = e;
        worst_at = p.grid[j];
      }
    }
  }
  // Oracle: the sweep converges to the weighted projection of x0 = 0 onto the
  // discrete solution set; its distance to x*(s) = s is the discretization floor.
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p.usable[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  Matrix Az(static_cast<Eigen::Index>(rows.size()), p.size());
  Point g(static_cast<Eigen::Index>(rows.size()));
  const Point sw = p.weights.cwiseSqrt();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Az.row(static_cast<Eigen::Index>(r)) = p.kernel.row(rows[r]).cwiseProduct(sw.transpose());
    g[static_cast<Eigen::Index>(r)] = p.rhs[rows[r]];
  }
  const Point lsq = Point(Az.completeOrthogonalDecomposition().solve(g)).cwiseQuotient(sw);
  double floor_err = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p.grid[j] >= 0.05 - 1e-12) floor_err = std::max(floor_err, std::abs(lsq[j] - p.grid[j]));
  }
  o.require(sup_err <= 0.05, "sup error on s in [0.05, 1] = " + fmt("%.4f", sup_err) + " at s = " + fmt("%.3f", worst_at) +
                                 " (limit 0.05; least-squares floor " + fmt("%.4f", floor_err) + ")");

  const auto& l2 = res.history.l2_norm;
  std::vector<double> smooth;
  for (std::size_t start = 0; start + 100 <= l2.size(); start += 100) {
    double s = 0.0;
    for (std::size_t k = start; k < start + 100; ++k) s += l2[k];
    smooth.push_back(s / 100.0);
  }
  std::size_t increases = 0;
  for (std::size_t i = 1; i < smooth.size(); ++i) increases += smooth[i] > smooth[i - 1];
  o.require(increases == 0, "100-iteration block means of the weighted L2 residual: " + std::to_string(increases) +
                                " increases over " + std::to_string(smooth.size() - 1) + " blocks");
  return o;
}

Outcome operator_suite() {
  Outcome o;
  RngStream rng(8, 0);
  const std::vector<OperatorSpec> projectors = {
      ops::IntervalProjector{0.2},
      ops::LineProjector{1.1},
      ops::BallProjector{make_point({0.5, -1.0, 2.0}), 1.5},
      ops::HalfspaceProjector{make_point({2.0, -1.0, 0.5}), 1.0},
      ops::AffineHyperplaneProjector{make_point({1.0, 1.0, -2.0}), -0.5},
      ops::PointProjector{make_point({0.0, 10.0})},
  };
  for (const auto& p : projectors) {
    const auto n = expected_dimension(p).value_or(3);
    std::vector<std::pair<Point, Point>> pairs;
    double idem = 0.0, firm = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Point x = random_point(rng, n, -10.0, 10.0), y = random_point(rng, n, -10.0, 10.0);
      const Point px = apply(p, x);
      const Point py = apply(p, y);
      idem = std::max(idem, (apply(p, px) - px).norm());
      firm = std::max(firm, (px - py).squaredNorm() - (px - py).dot(x - y));
      pairs.emplace_back(std::move(x), std::move(y));
    }
    const auto avg = verify_averaged_sampled(p, 0.5, pairs);
    o.require(idem <= 1e-9 && firm <= 1e-9 && avg.all_pass,
              describe(p) + ": idempotence " + fmt("%.1e", idem) + ", firm excess " + fmt("%.1e", firm) +
                  ", averaged violation " + fmt("%.1e", avg.worst_violation));
  }
  const std::vector<std::pair<Point, Point>> witness = {{make_point({-2.0}), make_point({-1.0})}};
  o.require(!verify_averaged_sampled(ops::Huber{1.0}, 0.5, witness).all_pass, "Huber fails averagedness at (-2, -1)");

  std::vector<Point> samples;
  while (samples.size() < 1000) {
    Point x = random_point(rng, 2, -3.0, 3.0);
    if (x.norm() >= 1e-3) samples.push_back(std::move(x));
  }
  const auto para = verify_paracontraction_sampled(ops::ExpQuasiconvexProx{}, FixedPointSet::single_point(Point::Zero(2)),
                                                   samples);
  o.require(para.all_strict && para.min_margin > 0.0,
            "exp prox paracontraction, min margin " + fmt("%.3e", para.min_margin));
  double inv = 0.0;
  for (const auto& x : samples) {
    const Point px = apply(ops::ExpQuasiconvexProx{}, x);
    inv = std::max(inv, ((1.0 + 2.0 * std::exp(-px.squaredNorm())) * px - x).norm());
  }
  o.require(inv <= 1e-10, "prox inverts A(x) = (1 + 2 exp(-|x|^2)) x, worst " + fmt("%.2e", inv));
  return o;
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "rfi_acceptance_determinism";
  fs::remove_all(root);
  for (const auto& b : bundled_scenarios()) {
    const auto sc = load_scenario(b.path);
    std::vector<std::map<std::string, std::string>> outs;
    int run = 0;
    for (unsigned threads : {1u, 8u, 1u}) {
      RunOptions ro;
      ro.threads = threads;
      ro.out_dir = (root / b.name / std::to_string(run++)).string();
      run_scenario(sc, ro);
      outs.push_back(read_dir(*ro.out_dir));
    }
    const bool same = !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
    o.require(same, b.name + ": " + std::to_string(outs[0].size()) + " CSV file(s) identical across reruns and 1 vs 8 workers");
  }
  fs::remove_all(root);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "halfspace feasibility law", 5.0, halfspace_law},
      {2, "lines regularity constant and rate", 10.0, lines_rate},
      {3, "intervals non-regularity", 1.0, intervals_irregular},
      {4, "disks feasibility probability", 5.0, disk_feasibility},
      {5, "merit calculus", 30.0, merit_calculus},
      {6, "affine-subspace limit", 1.0, affine_limit},
      {7, "integral-equation solve", 20.0, integral_equation},
      {8, "operator property suite", 5.0, operator_suite},
      {9, "determinism of bundled scenarios", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0) out.require(secs < c.budget_s, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", c.budget_s) + " s");
    std::printf("[%s] %d. %s (%.2f s)\n", out.passed ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& n : out.notes) std::printf("       %s\n", n.c_str());
    failures += !out.passed;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
