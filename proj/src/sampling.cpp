#include "rfi/sampling.hpp"

#include "rfi/detail/overloaded.hpp"
#include "rfi/errors.hpp"

#include <cmath>
#include <numeric>

namespace rfi {

using detail::overloaded;

IndexDistribution IndexDistribution::finite(std::vector<OperatorSpec> operators, std::vector<double> probs) {
  if (operators.empty()) throw ConfigError("finite index law needs at least one operator");
  if (operators.size() != probs.size()) throw ConfigError("finite index law: operators/probs length mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("finite index law: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("finite index law: probabilities must sum to 1");
  return IndexDistribution(laws::FiniteDiscrete{std::move(operators), std::move(probs)});
}

IndexDistribution IndexDistribution::uniform(double lo, double hi, std::function<OperatorSpec(double)> builder) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("uniform index law requires finite lo < hi");
  }
  if (!builder) throw ConfigError("uniform index law requires an operator builder");
  return IndexDistribution(laws::ContinuousUniform{lo, hi, std::move(builder)});
}

IndexDraw sample_index(const IndexDistribution& dist, RngStream& rng) {
  const double u = rng.uniform();
  return std::visit(overloaded{
                        [&](const laws::FiniteDiscrete& d) {
                          std::size_t chosen = d.probs.size();
                          double cdf = 0.0;
                          for (std::size_t i = 0; i < d.probs.size(); ++i) {
                            cdf += d.probs[i];
                            if (u < cdf) {
                              chosen = i;
                              break;
                            }
                          }
                          if (chosen == d.probs.size()) {
                            // u beyond the rounded total: take the last index with mass.
                            chosen = d.probs.size() - 1;
                            while (chosen > 0 && d.probs[chosen] == 0.0) --chosen;
                          }
                          return IndexDraw{chosen, static_cast<double>(chosen), d.operators[chosen]};
                        },
                        [&](const laws::ContinuousUniform& d) {
                          const double t = d.lo + (d.hi - d.lo) * u;
                          return IndexDraw{0, t, d.builder(t)};
                        },
                    },
                    dist.variant());
}

InitialLaw InitialLaw::dirac(Point p) {
  require_finite(p, "dirac initial law");
  return InitialLaw(laws::Dirac{std::move(p)});
}

InitialLaw InitialLaw::uniform_box(Point lo, Point hi) {
  if (lo.size() != hi.size()) throw DimensionError("uniform_box: lo and hi differ in dimension");
  require_finite(lo, "uniform_box");
  require_finite(hi, "uniform_box");
  if (!(lo.array() < hi.array()).all()) throw ConfigError("uniform_box: need lo < hi componentwise");
  return InitialLaw(laws::UniformBox{std::move(lo), std::move(hi)});
}

InitialLaw InitialLaw::gaussian(Point mean, double stddev) {
  require_finite(mean, "gaussian initial law");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) throw ConfigError("gaussian: stddev must be > 0");
  return InitialLaw(laws::Gaussian{std::move(mean), stddev});
}

Eigen::Index InitialLaw::dimension() const {
  return std::visit(overloaded{
                        [](const laws::Dirac& d) { return d.point.size(); },
                        [](const laws::UniformBox& d) { return d.lo.size(); },
                        [](const laws::Gaussian& d) { return d.mean.size(); },
                    },
                    law_);
}

Point sample_initial(const InitialLaw& law, RngStream& rng) {
  return std::visit(overloaded{
                        [](const laws::Dirac& d) -> Point { return d.point; },
                        [&](const laws::UniformBox& d) -> Point {
                          Point x(d.lo.size());
                          for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(d.lo[i], d.hi[i]);
                          return x;
                        },
                        [&](const laws::Gaussian& d) -> Point {
                          Point x(d.mean.size());
                          for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = d.mean[i] + d.stddev * rng.normal();
                          return x;
                        },
                    },
                    law.variant());
}

}  // namespace rfi
