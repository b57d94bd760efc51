#include <cmath>

#include "doctest.h"
#include "wclt/distribution.hpp"
#include "wclt/error.hpp"
#include "wclt/sphere.hpp"

TEST_CASE("equal and explicit weights") {
  const auto e = wclt::equal_weights(4);
  for (double v : e.values()) CHECK(v == 0.5);
  CHECK(wclt::equal_weights(1)[0] == 1.0);
  double s = 0;
  for (double v : wclt::equal_weights(1000).values()) s += v * v;
  CHECK(std::abs(s - 1.0) < 1e-12);
  CHECK_THROWS(wclt::WeightVector::explicit_weights({0.5, 0.5}));
  CHECK(wclt::WeightVector::explicit_weights({0.6, 0.8}).describe() == "explicit");
  CHECK_THROWS_AS(wclt::equal_weights(0), wclt::DimensionMismatch);
}

TEST_CASE("sample_uniform is normalized and reproducible") {
  const auto a = wclt::sample_uniform(100, 42);
  const auto b = wclt::sample_uniform(100, 42);
  const auto c = wclt::sample_uniform(100, 43);
  double s = 0;
  for (double v : a.values()) s += v * v;
  CHECK(std::abs(s - 1.0) < 1e-12);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK(a[0] != c[0]);
  CHECK(a.describe() == "sampled:42");
}

TEST_CASE("sample_uniform is exchangeable") {
  const std::size_t n = 16;
  const int draws = 100000;
  double first = 0, last = 0, first2 = 0, last2 = 0;
  for (int i = 0; i < draws; ++i) {
    const auto t = wclt::sample_uniform(n, 5, i);
    const double a = t[0] * t[0], b = t[n - 1] * t[n - 1];
    first += a;
    last += b;
    first2 += a * a;
    last2 += b * b;
  }
  const double m1 = first / draws, m2 = last / draws;
  const double se = std::sqrt((first2 / draws - m1 * m1 + last2 / draws - m2 * m2) / draws);
  CHECK(std::abs(m1 - m2) < 3 * se);
  CHECK(std::abs(m1 - 1.0 / n) < 3 * std::sqrt((first2 / draws - m1 * m1) / draws));
}

TEST_CASE("theta statistics") {
  const auto e = wclt::equal_weights(10);
  const double d4 = 2.25;
  const auto s = wclt::theta_stats(e, std::span(&d4, 1));
  CHECK(s.delta_theta4 == doctest::Approx(d4 / 10).epsilon(1e-14));
  CHECK(s.sum_theta4_weighted == s.delta_theta4);
  const auto corner = wclt::WeightVector::explicit_weights({1.0, 0.0, 0.0});
  const auto c = wclt::theta_stats(corner, std::span(&d4, 1));
  CHECK(c.delta_theta4 == d4);
  CHECK(c.sum_theta3 == 1.0);
  const std::vector<double> two(2, 1.0);
  CHECK_THROWS_AS(wclt::theta_stats(corner, two), wclt::DimensionMismatch);
}

TEST_CASE("weighted fourth moment concentrates near 3 delta^4 / (n + 2)") {
  const std::size_t n = 1000;
  const double d4 = 1.0;
  double mean = 0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    mean += wclt::theta_stats(wclt::sample_uniform(n, 77, i), std::span(&d4, 1)).delta_theta4;
  }
  mean /= draws;
  CHECK(mean == doctest::Approx(3.0 / (n + 2)).epsilon(0.02));
}

TEST_CASE("tail exponent fit recovers a synthetic exponent") {
  std::vector<double> t, p;
  for (int i = 1; i <= 30; ++i) {
    t.push_back(0.2 * i);
    p.push_back(std::exp(-1.3 * std::pow(0.2 * i, 0.6)));
  }
  const auto fit = wclt::fit_tail_exponent(t, p, 1e-3, 0.5);
  REQUIRE(fit.fitted);
  CHECK(fit.exponent == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(std::exp(fit.log_constant) == doctest::Approx(1.3).epsilon(1e-10));
}

TEST_CASE("concentration experiment basics") {
  const auto grid = std::vector<double>{0.01, 0.1, 0.5, 1, 2, 4, 8};
  const auto sym = wclt::concentration_experiment(64, 1000, wclt::DistributionSpec::rademacher_product(1),
                                                  wclt::MultiIndex{3}, grid, 1);
  for (double v : sym.p_hat_s1) CHECK(v == 0.0);
  CHECK(sym.s1_all_subcritical);
  CHECK(sym.max_s1 == 0.0);

  const auto skew = wclt::concentration_experiment(64, 1000, wclt::DistributionSpec::skewed_three_point(),
                                                   wclt::MultiIndex{3}, grid, 1);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(skew.p_hat_s1[i] <= skew.p_hat_s1[i - 1]);
    CHECK(skew.p_hat_s2[i] <= skew.p_hat_s2[i - 1]);
  }
  for (double v : skew.p_hat_s2) CHECK((v >= 0.0 && v <= 1.0));
  CHECK_THROWS(wclt::concentration_experiment(64, 100, wclt::DistributionSpec::skewed_three_point(),
                                              wclt::MultiIndex{3}, grid, 1));
  CHECK_THROWS(wclt::concentration_experiment(64, 1000, wclt::DistributionSpec::skewed_three_point(),
                                              wclt::MultiIndex{2}, grid, 1));
}
