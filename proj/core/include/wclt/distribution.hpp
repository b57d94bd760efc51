#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wclt/rng.hpp"

namespace wclt {

struct Atom {
  std::vector<double> point;
  double prob = 0.0;

  bool operator==(const Atom&) const = default;
};

/// Provenance of a law built by one of the named constructors; kept so the
/// law serializes back to the same compact document.
struct FamilyInfo;

/// A k-dimensional summand law given by a finite atom list. Named families are
/// constructors that emit atom lists, so every moment is exactly computable.
///
/// Unless `allow_unnormalized` is set, construction enforces the summand
/// hypotheses: probabilities sum to 1, mean 0 and identity covariance.
class DistributionSpec {
 public:
  static constexpr double kProbTolerance = 1e-12;
  static constexpr double kMomentTolerance = 1e-10;

  DistributionSpec(std::size_t dimension, std::vector<Atom> atoms, std::string label,
                   bool allow_unnormalized = false);

  /// Product of k independent ±1 coordinates: 2^k equiprobable atoms.
  static DistributionSpec rademacher_product(std::size_t k);
  /// Product of k discrete uniforms on `levels` equispaced points, scaled to unit variance.
  static DistributionSpec uniform_cube_scaled(std::size_t k, unsigned levels);
  /// Mixture of atom laws with the given mixing weights.
  static DistributionSpec discrete_mixture(const std::vector<DistributionSpec>& components,
                                           const std::vector<double>& weights,
                                           bool allow_unnormalized = false);
  /// 1D law {(-1, 4/9), (1/2, 4/9), (2, 1/9)}: centered, unit variance, third moment 1/2.
  static DistributionSpec skewed_three_point();
  /// 1D law {(3, 1/10), (-1/3, 9/10)}: centered, unit variance, heavy fourth moment.
  static DistributionSpec heavy_atom();

  std::size_t dimension() const { return dimension_; }
  std::span<const Atom> atoms() const { return atoms_; }
  const std::string& label() const { return label_; }
  bool allow_unnormalized() const { return allow_unnormalized_; }
  const FamilyInfo* family() const { return family_.get(); }

  std::vector<double> mean() const;
  /// Row-major k×k covariance.
  std::vector<double> covariance() const;
  /// max over atoms of the Euclidean norm.
  double max_atom_norm() const;
  /// E‖X‖^4.
  double delta4() const;
  /// True when all atoms carry equal mass and their count is a power of two.
  bool equiprobable_power_of_two() const;

  /// Draws one atom index.
  std::size_t sample_index(Rng& rng) const;

 private:
  friend DistributionSpec with_family(DistributionSpec, std::shared_ptr<const FamilyInfo>);

  std::size_t dimension_;
  std::vector<Atom> atoms_;
  std::string label_;
  bool allow_unnormalized_;
  std::vector<double> cumulative_;
  std::shared_ptr<const FamilyInfo> family_;
};

struct FamilyInfo {
  std::string name;
  std::map<std::string, double> params;
  std::vector<DistributionSpec> components;
  std::vector<double> weights;
};

/// Equispaced discretization of N(0,1) on `atoms` points, rescaled to exact unit
/// variance, together with its exact Kolmogorov distance to Φ.
struct DiscretizedGaussian {
  DistributionSpec law;
  double kolmogorov_error;
};
DiscretizedGaussian gaussian_discretized(unsigned atoms, double half_width = 8.0);

/// JSON document: {"dimension", "label", "atoms": [{"point", "prob"}]} or
/// {"dimension", "family", ...parameters}. Numbers carry 17 significant digits.
std::string serialize(const DistributionSpec& d);
DistributionSpec parse_distribution(const std::string& text, bool allow_unnormalized = false);
DistributionSpec load_distribution(const std::string& path, bool allow_unnormalized = false);

}  // namespace wclt
