#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "wclt/distribution.hpp"
#include "wclt/error.hpp"
#include "wclt/moments.hpp"
#include "wclt/rng.hpp"

using wclt::DistributionSpec;

TEST_CASE("validation rejects malformed laws") {
  CHECK_THROWS_AS(DistributionSpec(1, {{{1.0}, 0.5}, {{-1.0}, 0.4}}, "bad"), wclt::NormalizationError);
  CHECK_THROWS_AS(DistributionSpec(1, {{{1.0}, 1.2}, {{-1.0}, -0.2}}, "bad"), wclt::NormalizationError);
  CHECK_THROWS_AS(DistributionSpec(1, {{{2.0}, 0.5}, {{0.0}, 0.5}}, "shifted"), wclt::NormalizationError);
  CHECK_THROWS_AS(DistributionSpec(1, {{{2.0}, 0.5}, {{-2.0}, 0.5}}, "wide"), wclt::NormalizationError);
  CHECK_NOTHROW(DistributionSpec(1, {{{2.0}, 0.5}, {{-2.0}, 0.5}}, "wide", true));
  CHECK_THROWS_AS(DistributionSpec(2, {{{1.0}, 1.0}}, "dims"), wclt::DimensionMismatch);
  try {
    DistributionSpec(1, {{{2.0}, 0.5}, {{0.0}, 0.5}}, "shifted");
  } catch (const wclt::NormalizationError& e) {
    CHECK(std::string(e.what()).find("--allow-unnormalized") != std::string::npos);
  }
}

TEST_CASE("named families satisfy the summand hypotheses") {
  for (const auto& d : {DistributionSpec::rademacher_product(1), DistributionSpec::rademacher_product(3),
                        DistributionSpec::uniform_cube_scaled(2, 5), DistributionSpec::skewed_three_point(),
                        DistributionSpec::heavy_atom()}) {
    const auto m = d.mean();
    const auto c = d.covariance();
    const std::size_t k = d.dimension();
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(m[i]) < 1e-12);
      for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(c[i * k + j] - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK(DistributionSpec::rademacher_product(3).atoms().size() == 8);
  CHECK(DistributionSpec::rademacher_product(3).equiprobable_power_of_two());
  CHECK_FALSE(DistributionSpec::heavy_atom().equiprobable_power_of_two());
  CHECK(DistributionSpec::heavy_atom().delta4() == doctest::Approx(0.1 * 81 + 0.9 / 81));
  const auto mu3 = wclt::exact_moments(DistributionSpec::skewed_three_point(), 3)[wclt::MultiIndex{3}];
  CHECK(mu3 == doctest::Approx(0.5));
}

TEST_CASE("mixtures") {
  const auto r = DistributionSpec::rademacher_product(1);
  const auto s = DistributionSpec::skewed_three_point();
  const auto mix = DistributionSpec::discrete_mixture({r, s}, {0.25, 0.75});
  CHECK(mix.atoms().size() == 5);
  CHECK(mix.delta4() == doctest::Approx(0.25 * r.delta4() + 0.75 * s.delta4()));
  CHECK_THROWS(DistributionSpec::discrete_mixture({r, s}, {0.5, 0.6}));
}

TEST_CASE("serialization round trip") {
  const auto d = DistributionSpec::skewed_three_point();
  const auto back = wclt::parse_distribution(wclt::serialize(d));
  CHECK(back.label() == d.label());
  REQUIRE(back.atoms().size() == d.atoms().size());
  for (std::size_t i = 0; i < d.atoms().size(); ++i) {
    CHECK(back.atoms()[i].prob == doctest::Approx(d.atoms()[i].prob).epsilon(1e-16));
  }
  const auto raw = DistributionSpec(1, {{{-1.0}, 0.5}, {{1.0}, 0.5}}, "coin");
  const auto text = wclt::serialize(raw);
  CHECK(text.find("\"atoms\"") != std::string::npos);
  const auto parsed = wclt::parse_distribution(text);
  CHECK(std::equal(parsed.atoms().begin(), parsed.atoms().end(), raw.atoms().begin(), raw.atoms().end()));
  const auto fam = wclt::parse_distribution(R"({"dimension": 2, "family": "rademacher_product"})");
  CHECK(fam.atoms().size() == 4);
  CHECK_THROWS_AS(wclt::parse_distribution("{\"dimension\": 1, \"family\": \"cauchy\"}"),
                  wclt::UnsupportedFamily);
  CHECK_THROWS_AS(wclt::parse_distribution("not json"), wclt::ParseError);
}

TEST_CASE("discretized Gaussian reports its own Kolmogorov error") {
  const auto g = wclt::gaussian_discretized(401);
  CHECK(g.law.atoms().size() == 401);
  CHECK(g.kolmogorov_error > 0.0);
  CHECK(g.kolmogorov_error < 0.02);
  CHECK(std::abs(g.law.covariance()[0] - 1.0) < 1e-12);
}

TEST_CASE("sampling frequencies follow the atom masses") {
  const auto d = DistributionSpec::heavy_atom();
  wclt::Rng rng(99);
  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) hits += d.atoms()[d.sample_index(rng)].point[0] > 0 ? 1 : 0;
  const double se = std::sqrt(0.1 * 0.9 / n);
  CHECK(std::abs(hits / static_cast<double>(n) - 0.1) < 4 * se);
}
