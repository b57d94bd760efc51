#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wclt/moments.hpp"
#include "wclt/multiindex.hpp"

namespace wclt {

/// P_r(t, κ) in the monomial basis. Coefficients are real; the factor i^{|ν|}
/// appears only when the polynomial is evaluated at i·t.
class EdgeworthPolynomial {
 public:
  EdgeworthPolynomial(unsigned r, std::size_t dimension, std::map<MultiIndex, double> coefficients);

  unsigned order_index() const { return r_; }
  std::size_t dimension() const { return dimension_; }
  /// Ordered by graded lexicographic monomial index.
  const std::map<MultiIndex, double>& coefficients() const { return coefficients_; }
  double coefficient(const MultiIndex& nu) const;

 private:
  unsigned r_;
  std::size_t dimension_;
  std::map<MultiIndex, double> coefficients_;
};

/// Builds P_r by materializing the composition sum
///   P_r = Σ_{m=1}^{r} 1/m! Σ_{i_1+…+i_m = r} Σ_{|ν_j| = i_j+2} Π_j κ_{ν_j}/ν_j! · t^{ν_1+…+ν_m}.
EdgeworthPolynomial build_P(unsigned r, const CumulantTable& weighted);

std::complex<double> eval_P(const EdgeworthPolynomial& p, std::span<const std::complex<double>> z);

enum class CovarianceMode { identity, general };

/// exp(−‖t‖²/2)·Σ_{r=0}^{r_max} P_r(i·Q·t); Q = I in identity mode.
class EdgeworthApproximant {
 public:
  /// Identity covariance mode.
  EdgeworthApproximant(const CumulantTable& weighted, unsigned r_max);
  /// General mode with a row-major k×k normalizer Q.
  EdgeworthApproximant(const CumulantTable& weighted, unsigned r_max, std::vector<double> q);

  std::size_t dimension() const { return dimension_; }
  CovarianceMode mode() const { return mode_; }
  unsigned r_max() const { return static_cast<unsigned>(polynomials_.size()) - 1; }
  std::span<const EdgeworthPolynomial> polynomials() const { return polynomials_; }
  const std::vector<double>& normalizer() const { return q_; }

 private:
  std::size_t dimension_;
  CovarianceMode mode_;
  std::vector<EdgeworthPolynomial> polynomials_;
  std::vector<double> q_;
};

/// Upper limit on r_max accepted by EdgeworthApproximant.
inline constexpr unsigned kMaxEdgeworthOrder = 4;

std::complex<double> approximant_cf(const EdgeworthApproximant& a, std::span<const double> t);

/// Term-wise inverse Fourier transform for k = 1:
///   F(x) = Φ(x) − φ(x)·Σ_r Σ_m c_{r,m} q^m He_{m−1}(x).
double corrected_cdf_1d(const EdgeworthApproximant& a, double x);

}  // namespace wclt
