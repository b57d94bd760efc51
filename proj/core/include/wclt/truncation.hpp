#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wclt/distribution.hpp"
#include "wclt/linalg.hpp"
#include "wclt/rng.hpp"

namespace wclt {

/// One summand after truncation at level 1: Y_j = X_j·1(‖θ_j X_j‖ ≤ 1) and
/// Z_j = Y_j − E Y_j. Excluded outcomes keep their mass at the zero vector.
struct TruncatedSummand {
  const DistributionSpec* source = nullptr;
  double weight = 0.0;
  std::vector<Atom> y_atoms;
  std::vector<double> y_mean;
  std::vector<Atom> z_atoms;
  /// P(‖θ_j X_j‖ > 1).
  double excluded_mass = 0.0;

  /// Row-major covariance of Z_j.
  std::vector<double> z_covariance() const;
  /// Z_j as an (unnormalized) atom law.
  DistributionSpec z_law() const;
};

/// `d` must outlive the returned summand.
TruncatedSummand truncate(const DistributionSpec& d, double weight);

struct NormalizationState {
  std::vector<double> a_n;  ///< Σ θ_j E Y_j
  Matrix d;                 ///< Σ θ_j² cov(Z_j)
  Matrix q;                 ///< symmetric positive definite, Q² = D⁻¹
  double delta_theta4 = 0.0;
  std::vector<double> d_eigenvalues;  ///< ascending
};

/// Smallest eigenvalue of D accepted before DegenerateCovariance is raised.
inline constexpr double kMinCovarianceEigenvalue = 1e-10;

NormalizationState normalization(std::span<const TruncatedSummand> summands);

struct TruncationTvBound {
  double excluded_probability;  ///< Σ_j P(‖θ_j X_j‖ > 1)
  double delta_theta4;
  bool holds;  ///< excluded_probability ≤ δ_θ⁴ + 1e-12
};

TruncationTvBound truncation_tv_bound(std::span<const TruncatedSummand> summands);

/// Slack record for the three covariance perturbation bounds that hold
/// whenever δ_θ⁴ ≤ 1/(8k).
struct CovarianceBoundCheck {
  double delta_theta4 = 0.0;
  bool precondition = false;  ///< δ_θ⁴ ≤ 1/(8k)
  double quadratic_form_ratio = 0.0;  ///< max_t |⟨t,Dt⟩ − ‖t‖²| / ‖t‖²
  double quadratic_form_bound = 0.0;  ///< 2kδ_θ⁴
  double d_minus_identity_norm = 0.0;
  double d_inverse_norm = 0.0;
  bool quadratic_form_ok = false;
  bool d_minus_identity_ok = false;  ///< ‖D − I‖ ≤ 1/4
  bool d_inverse_ok = false;         ///< ‖D⁻¹‖ ≤ 4/3
  bool all_ok() const { return quadratic_form_ok && d_minus_identity_ok && d_inverse_ok; }
};

CovarianceBoundCheck check_covariance_bounds(const NormalizationState& state, std::size_t k,
                                             Rng& rng, unsigned directions = 100);

}  // namespace wclt
