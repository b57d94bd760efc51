#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wclt/distribution.hpp"
#include "wclt/rng.hpp"
#include "wclt/sphere.hpp"

namespace wclt {

/// Slab {x : a ≤ ⟨u, x⟩ ≤ b}; use ±infinity for half-spaces.
struct Halfspace {
  std::vector<double> direction;
  double lower;
  double upper;
};

/// Centered ball of radius r in dimension k.
struct Ball {
  std::size_t dimension;
  double radius;
};

/// Standard Gaussian measure Φ(B). Slabs reduce to Φ(b) − Φ(a); balls to the
/// χ²_k CDF at r².
double gaussian_measure(const Halfspace& slab);
double gaussian_measure(const Ball& ball);

enum class SetKind { intervals_1d, halfspaces, balls };

/// Finite sub-family of convex sets. The reported discrepancy is a lower bound
/// of the supremum over all convex sets.
struct SetClass {
  SetKind kind = SetKind::intervals_1d;
  std::size_t directions = 16;
  std::vector<double> levels;  ///< offsets (half-lines/half-spaces) or radii (balls)
  std::uint64_t direction_seed = 0;

  static SetClass intervals();
  static SetClass halfspaces(std::size_t directions, std::uint64_t seed = 0);
  static SetClass balls(std::size_t dimension);

  /// Parses "intervals", "halfspaces:<m_dir>" or "balls".
  static SetClass parse(const std::string& text, std::size_t dimension);
  std::string describe() const;
  void validate() const;
};

/// Normal quantiles at levels i/(count+1), i = 1..count.
std::vector<double> normal_quantile_grid(std::size_t count = 129);

/// Unit directions on S^{k−1}: equally spaced half-circle angles for k = 2, a
/// Fibonacci spiral on the upper hemisphere for k = 3 (azimuth offset from
/// the seed), seeded Gaussian directions for k > 3, {+1} for k = 1.
std::vector<std::vector<double>> direction_family(std::size_t k, std::size_t count,
                                                  std::uint64_t seed);

enum class DiscrepancyMethod { cf_inversion_exact, enumeration_exact, monte_carlo };
std::string to_string(DiscrepancyMethod m);

struct DiscrepancyResult {
  double value = 0.0;
  DiscrepancyMethod method = DiscrepancyMethod::cf_inversion_exact;
  std::string set_class;
  std::string witness;
  /// Binomial standard error at the witness (Monte Carlo only).
  double se = 0.0;
  /// Largest binomial standard error over the family (Monte Carlo only).
  double max_se = 0.0;
  std::size_t samples = 0;
  /// Quadrature error estimate (inversion) or 0 (enumeration).
  double method_error = 0.0;
};

/// Largest merged support enumerated exactly by discrepancy_1d.
inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

/// Kolmogorov distance of Σθ_j X_j to Φ for k = 1: exact enumeration when the
/// support has at most kEnumerationCap atoms (always for equal weights),
/// characteristic-function inversion otherwise.
DiscrepancyResult discrepancy_1d(const DistributionSpec& d, const WeightVector& theta);

/// Writes one realization of a k-dimensional S into `out`.
using SumSampler = std::function<void(Rng&, std::span<double>)>;

/// Sampler for Σθ_j X_j. Equiprobable power-of-two atom laws (e.g. product
/// Rademacher) use byte-indexed partial-sum tables.
SumSampler weighted_sum_sampler(const DistributionSpec& d, const WeightVector& theta);

inline constexpr std::size_t kMinMonteCarloSamples = 10000;

struct MonteCarloOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t chunks = 64;
};

/// max over the family of |P̂(S ∈ B) − Φ(B)| from M i.i.d. draws. Chunk c
/// draws from substream (seed, c), so results do not depend on `threads`.
DiscrepancyResult discrepancy_mc(const SumSampler& sampler, std::size_t k, const SetClass& cls,
                                 const MonteCarloOptions& options);
DiscrepancyResult discrepancy_mc(const DistributionSpec& d, const WeightVector& theta,
                                 const SetClass& cls, const MonteCarloOptions& options);

}  // namespace wclt
