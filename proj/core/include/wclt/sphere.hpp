#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wclt/distribution.hpp"
#include "wclt/multiindex.hpp"
#include "wclt/rng.hpp"

namespace wclt {

enum class WeightProvenance { sampled, equal_weights, explicit_weights };

/// θ ∈ S^{n−1}.
class WeightVector {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  /// Validates Σθ² = 1 within kUnitTolerance.
  static WeightVector explicit_weights(std::vector<double> theta);

  std::size_t size() const { return theta_.size(); }
  std::span<const double> values() const { return theta_; }
  double operator[](std::size_t j) const { return theta_[j]; }
  WeightProvenance provenance() const { return provenance_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  double max_abs() const;
  double l1_norm() const;
  /// "equal", "sampled:<seed>" or "explicit".
  std::string describe() const;

 private:
  friend WeightVector sample_uniform(std::size_t n, std::uint64_t seed, std::uint64_t stream);
  friend WeightVector equal_weights(std::size_t n);
  WeightVector(std::vector<double> theta, WeightProvenance p, std::optional<std::uint64_t> seed)
      : theta_(std::move(theta)), provenance_(p), seed_(seed) {}

  std::vector<double> theta_;
  WeightProvenance provenance_;
  std::optional<std::uint64_t> seed_;
};

/// n standard normals divided by their norm, from substream (seed, stream).
/// A zero draw is resampled on the next substream.
WeightVector sample_uniform(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);
WeightVector equal_weights(std::size_t n);

struct ThetaStats {
  double delta_theta4;         ///< Σ θ_j⁴ δ_j⁴
  double sum_theta3;           ///< Σ θ_j³
  double sum_theta4_weighted;  ///< same value as delta_theta4
};

/// `delta4` holds one δ_j⁴ per weight, or a single shared value.
ThetaStats theta_stats(const WeightVector& theta, std::span<const double> delta4);

struct ExponentFit {
  bool fitted = false;
  double exponent = 0.0;
  double log_constant = 0.0;
  std::size_t points = 0;
};

struct ConcentrationReport {
  std::size_t n = 0;
  std::size_t replicates = 0;
  MultiIndex nu;
  std::vector<double> t_grid;
  std::vector<double> p_hat_s1;
  std::vector<double> p_hat_s2;
  ExponentFit fit_s1;
  ExponentFit fit_s2;
  bool s1_all_subcritical = false;
  bool s2_all_subcritical = false;
  /// max over replicates of S₁; zero for symmetric sources.
  double max_s1 = 0.0;
};

/// Fits log(−log p) = log c + exponent · log t over points with p in [lo, hi].
ExponentFit fit_tail_exponent(std::span<const double> t, std::span<const double> p, double lo,
                              double hi);

/// Tail experiment for S₁ = n·|Σθ_j³ μ_ν(Z_j)|/δ⁴ and S₂ = n·Σδ_j⁴θ_j⁴/δ⁴ under
/// uniformly distributed θ. Replicate r draws θ from substream (seed, r).
ConcentrationReport concentration_experiment(std::size_t n, std::size_t replicates,
                                             const DistributionSpec& d, const MultiIndex& nu,
                                             std::span<const double> t_grid, std::uint64_t seed,
                                             unsigned threads = 1);

}  // namespace wclt
