#include "rfi/errors.hpp"
#include "rfi/rng.hpp"
#include "rfi/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace rfi;

TEST_CASE("rng streams reproduce and separate") {
  RngStream a(123, 5), b(123, 5), c(123, 6), d(124, 5), e(123, 5, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
    CHECK(x != e.next_u64());
  }
  CHECK(a.draws() == 100);
  RngStream u(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  RngStream n(1, 0);
  n.normal();
  CHECK(n.draws() == 2);
}

TEST_CASE("independent streams are uncorrelated") {
  const int n = 100000;
  RngStream a(99, 0), b(99, 1);
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::abs(rho) < 0.01);
}

TEST_CASE("finite index law") {
  const auto law = IndexDistribution::finite({ops::Identity{}, ops::Identity{}}, {0.3, 0.7});
  RngStream rng(2024, 0);
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_index(law, rng).index == 0;
  CHECK(std::abs(ones / double(n) - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / n));
  CHECK(rng.draws() == std::uint64_t(n));

  const auto single = IndexDistribution::finite({ops::Rotation{1.0}}, {1.0});
  RngStream r2(1, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_index(single, r2).index == 0);
}

TEST_CASE("finite index law passes chi-square at 0.001") {
  const std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
  const auto law = IndexDistribution::finite(std::vector<OperatorSpec>(4, ops::Identity{}), p);
  RngStream rng(77, 3);
  const int n = 1000000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[sample_index(law, rng).index];
  double chi2 = 0.0;
  for (int i = 0; i < 4; ++i) chi2 += std::pow(counts[i] - n * p[i], 2) / (n * p[i]);
  CHECK(chi2 < 16.266);  // chi-square(3) upper 0.001 quantile
}

TEST_CASE("index law validation") {
  CHECK_THROWS_AS(IndexDistribution::finite({ops::Identity{}}, {0.9}), ConfigError);
  CHECK_THROWS_AS(IndexDistribution::finite({ops::Identity{}, ops::Identity{}}, {1.5, -0.5}), ConfigError);
  CHECK_THROWS_AS(IndexDistribution::finite({ops::Identity{}}, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(IndexDistribution::uniform(1.0, 1.0, [](double) -> OperatorSpec { return ops::Identity{}; }),
                  ConfigError);
}

TEST_CASE("continuous uniform index law") {
  const auto law = IndexDistribution::uniform(0.0, 2.0 * std::numbers::pi, [](double t) -> OperatorSpec {
    return ops::BallProjector{0.5 * make_point({std::cos(t), std::sin(t)}), 1.0};
  });
  RngStream rng(5, 0);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto d = sample_index(law, rng);
    sum += d.parameter;
    if (i == 0) CHECK(std::holds_alternative<ops::BallProjector>(d.op));
  }
  CHECK(std::abs(sum / n - std::numbers::pi) <= 3.0 * (2.0 * std::numbers::pi / std::sqrt(12.0)) / 1000.0);
}

TEST_CASE("initial laws") {
  RngStream rng(8, 0, RngStream::kInitialLaw);
  const auto dirac = InitialLaw::dirac(make_point({-1.0, -1.0}));
  CHECK(sample_initial(dirac, rng) == make_point({-1.0, -1.0}));
  CHECK(rng.draws() == 0);

  const auto box = InitialLaw::uniform_box(make_point({0.0, 0.0}), make_point({1.0, 1.0}));
  const int n = 100000;
  Point mean = Point::Zero(2);
  for (int i = 0; i < n; ++i) mean += sample_initial(box, rng);
  mean /= n;
  for (int j = 0; j < 2; ++j) CHECK(std::abs(mean[j] - 0.5) <= 3.0 / std::sqrt(12.0) / std::sqrt(double(n)));

  const auto g = InitialLaw::gaussian(make_point({0.0}), 1.0);
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_initial(g, rng)[0];
    s += v;
    ss += v * v;
  }
  const double var = (ss - s * s / n) / (n - 1);
  CHECK(std::abs(var - 1.0) <= 0.05);

  CHECK_THROWS_AS(InitialLaw::uniform_box(make_point({0.0, 1.0}), make_point({1.0, 1.0})), ConfigError);
  CHECK_THROWS_AS(InitialLaw::gaussian(make_point({0.0}), 0.0), ConfigError);
}
