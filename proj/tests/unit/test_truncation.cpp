#include <cmath>

#include "doctest.h"
#include "wclt/distribution.hpp"
#include "wclt/error.hpp"
#include "wclt/rng.hpp"
#include "wclt/sphere.hpp"
#include "wclt/truncation.hpp"

using wclt::DistributionSpec;

TEST_CASE("inactive truncation is the identity") {
  const auto d = DistributionSpec::rademacher_product(1);
  const auto s = wclt::truncate(d, 0.5);
  CHECK(s.excluded_mass == 0.0);
  CHECK(s.y_atoms == std::vector<wclt::Atom>(d.atoms().begin(), d.atoms().end()));
  CHECK(s.z_atoms == s.y_atoms);
  const auto zero = wclt::truncate(DistributionSpec::heavy_atom(), 0.0);
  CHECK(zero.excluded_mass == 0.0);
  CHECK(zero.y_mean[0] == doctest::Approx(0.0));
}

TEST_CASE("atom at 3 is moved to the origin") {
  const auto d = DistributionSpec::heavy_atom();
  const auto s = wclt::truncate(d, 0.5);
  CHECK(s.excluded_mass == doctest::Approx(0.1));
  CHECK(s.y_mean[0] == doctest::Approx(0.0 - 0.3));
  double zmean = 0.0;
  for (const auto& a : s.z_atoms) zmean += a.prob * a.point[0];
  CHECK(std::abs(zmean) < 1e-12);
  for (const auto& a : s.y_atoms) CHECK((std::abs(0.5 * a.point[0]) <= 1.0 || a.point[0] == 0.0));
  const auto tv = wclt::truncation_tv_bound(std::vector<wclt::TruncatedSummand>{s});
  CHECK(tv.excluded_probability == doctest::Approx(0.1));
  CHECK(tv.holds);
}

TEST_CASE("normalization with inactive truncation") {
  const auto d = DistributionSpec::rademacher_product(2);
  const auto theta = wclt::equal_weights(16);
  std::vector<wclt::TruncatedSummand> s;
  for (double w : theta.values()) s.push_back(wclt::truncate(d, w));
  const auto state = wclt::normalization(s);
  CHECK(state.a_n[0] == 0.0);
  CHECK((state.d - wclt::Matrix::identity(2)).max_abs() < 1e-14);
  CHECK((state.q - wclt::Matrix::identity(2)).max_abs() < 1e-12);
  CHECK(state.delta_theta4 == doctest::Approx(d.delta4() / 16));
}

TEST_CASE("normalization invariants and covariance bounds on random weights") {
  const auto d = DistributionSpec::heavy_atom();
  wclt::Rng rng(4);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto theta = wclt::sample_uniform(seed % 2 ? 64 : 256, seed);
    std::vector<wclt::TruncatedSummand> s;
    for (double w : theta.values()) s.push_back(wclt::truncate(d, w));
    const auto state = wclt::normalization(s);
    CHECK(state.d.is_symmetric(1e-15));
    CHECK(state.q.is_symmetric(1e-12));
    CHECK((state.q * state.q * state.d - wclt::Matrix::identity(1)).max_abs() <= 1e-9);
    CHECK(std::abs(state.a_n[0]) <= state.delta_theta4 + 1e-15);
    CHECK(wclt::truncation_tv_bound(s).holds);
    const auto check = wclt::check_covariance_bounds(state, 1, rng);
    if (check.precondition) {
      ++checked;
      CHECK(check.all_ok());
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("degenerate covariance is reported") {
  const auto d = DistributionSpec(1, {{{3.0}, 0.5}, {{-3.0}, 0.5}}, "wide", true);
  std::vector<wclt::TruncatedSummand> s{wclt::truncate(d, 1.0)};
  CHECK_THROWS_AS(wclt::normalization(s), wclt::DegenerateCovariance);
}
