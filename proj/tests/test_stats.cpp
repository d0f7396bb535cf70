#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrg/errors.hpp"
#include "rrg/rng.hpp"
#include "rrg/stats.hpp"
#include "rrg/theory.hpp"

using namespace rrg;

namespace {

// Brute-force sup of |F_a - F_b| over every sample point.
double ks_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& s, double t) {
    double c = 0;
    for (double v : s) c += v <= t;
    return c / s.size();
  };
  double best = 0;
  for (const auto* s : {&a, &b})
    for (double t : *s) best = std::max(best, std::abs(cdf(a, t) - cdf(b, t)));
  return best;
}

std::vector<double> uniforms(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("KS examples") {
  const std::vector<double> a{0.3, 0.1, 0.7, 0.7};
  CHECK(ks_distance(a, a).statistic == 0);
  CHECK(ks_distance({0.0}, {1.0}).statistic == 1);
  const auto r = ks_distance({1, 2, 3}, {1, 2, 3, 4, 5});
  CHECK(r.n1 == 3);
  CHECK(r.n2 == 5);
  CHECK(r.statistic == doctest::Approx(0.4));
  CHECK_THROWS_AS(ks_distance({}, {1.0}), domain_error);
  CHECK_THROWS_AS(ks_distance({1.0}, {}), domain_error);
}

TEST_CASE("KS of two large uniform samples") {
  Rng rng(12);
  const auto r = ks_distance(uniforms(100000, rng), uniforms(100000, rng));
  CHECK(r.statistic < 0.01);
  CHECK(r.statistic < 1.36 * std::sqrt(2.0 / 1e5));
}

TEST_CASE("KS agrees with a brute-force oracle, including ties") {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(1 + rng.below(30)), b(1 + rng.below(30));
    for (auto& v : a) v = static_cast<double>(rng.below(8));
    for (auto& v : b) v = static_cast<double>(rng.below(8)) + (t % 2 ? 0.5 : 0.0);
    const double s = ks_distance(a, b).statistic;
    CHECK(s == doctest::Approx(ks_oracle(a, b)).epsilon(1e-14));
    CHECK(s >= 0);
    CHECK(s <= 1);
  }
}

TEST_CASE("KS is symmetric and invariant under monotone transforms") {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    auto a = uniforms(200, rng), b = uniforms(150, rng);
    for (auto& v : b) v = v * v;
    const double s = ks_distance(a, b).statistic;
    CHECK(ks_distance(b, a).statistic == s);
    auto ea = a, eb = b;
    for (auto& v : ea) v = std::exp(3 * v) - 7;
    for (auto& v : eb) v = std::exp(3 * v) - 7;
    CHECK(ks_distance(ea, eb).statistic == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("Poisson mean z-score") {
  CHECK(poisson_mean_test({3, 3, 3, 3}, 3.0) == 0);
  CHECK(poisson_mean_test(std::vector<long long>(100, 2), 1.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(poisson_mean_test({1, 2}, 0.0), domain_error);
  CHECK_THROWS_AS(poisson_mean_test({1, 2}, -1.0), domain_error);
  CHECK_THROWS_AS(poisson_mean_test({}, 1.0), domain_error);
  Rng rng(15);
  std::vector<long long> c(2000);
  for (auto& v : c) v = poisson(4.0 / 3, rng);
  CHECK(std::abs(poisson_mean_test(c, 4.0 / 3)) < 3);
}

TEST_CASE("Poisson z-score is linear in the mean shift") {
  const std::vector<long long> c{1, 4, 2, 0, 3, 5, 2, 1};
  const double lam = 2.0;
  const double z0 = poisson_mean_test(c, lam);
  auto shifted = c;
  for (auto& v : shifted) v += 3;
  CHECK(poisson_mean_test(shifted, lam) - z0 == doctest::Approx(3 / std::sqrt(lam / c.size())));
}

TEST_CASE("summaries") {
  const auto s = summarize({1, 2, 3, 4});
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3));
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 12)));
  const auto one = summarize({7});
  CHECK(one.variance == 0);
  CHECK(one.se == 0);
  CHECK_THROWS_AS(summarize({}), domain_error);
  Rng rng(16);
  for (int t = 0; t < 20; ++t) {
    const auto u = uniforms(1 + rng.below(50), rng);
    const auto r = summarize(u);
    CHECK(r.variance >= 0);
    CHECK(r.se == doctest::Approx(std::sqrt(r.variance / r.count)));
  }
}

TEST_CASE("correlation") {
  CHECK(correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(correlation({1, 1, 1}, {1, 2, 3}) == 0);
  CHECK_THROWS_AS(correlation({1, 2}, {1, 2, 3}), dimension_error);
}
