#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wclt/distribution.hpp"
#include "wclt/sphere.hpp"

namespace wclt {

/// Characteristic function of S = Σ_j θ_j X_j for independent atom laws,
/// evaluated as the product Π_j φ_j(θ_j t). Summands sharing (law, θ_j) are
/// grouped and raised to their multiplicity.
class ProductCF {
 public:
  /// Identically distributed summands.
  ProductCF(const DistributionSpec& law, std::span<const double> theta);
  /// One law per weight.
  ProductCF(std::vector<DistributionSpec> laws, std::span<const double> theta);

  /// Analytic injection (k = 1): φ is any characteristic function with the
  /// given mean; `radius` bounds |S − mean| up to negligible probability.
  static ProductCF from_function(std::function<std::complex<double>(double)> phi, double mean,
                                 double radius);

  std::size_t dimension() const { return dimension_; }
  std::size_t summands() const { return summand_count_; }

  std::complex<double> operator()(std::span<const double> t) const;
  std::complex<double> eval_1d(double t) const;

  /// E S (k = 1).
  double mean_1d() const { return mean_; }
  /// R with P(|S − E S| > R) ≤ 1e-16 (k = 1): the smaller of the hard bound
  /// Σ|θ_j|·max‖x‖ and a Hoeffding radius.
  double support_radius() const { return radius_; }

  /// Exact merged support of S (k = 1), sorted, or nullopt once more than
  /// `cap` distinct points appear.
  std::optional<std::vector<std::pair<double, double>>> exact_support_1d(std::size_t cap) const;

 private:
  struct Group {
    std::size_t law = 0;
    double weight = 0.0;
    std::size_t multiplicity = 0;
  };
  struct FoldedLaw {
    bool symmetric = false;
    // symmetric: φ(s) = Σ p cos(s x); otherwise φ(s) = Σ p e^{isx}.
    std::vector<std::pair<double, double>> terms;
  };

  ProductCF() = default;
  void build(std::span<const double> theta, const std::vector<std::size_t>& law_of);

  std::size_t dimension_ = 1;
  std::size_t summand_count_ = 0;
  std::vector<DistributionSpec> laws_;
  std::vector<FoldedLaw> folded_;
  std::vector<Group> groups_;
  std::function<std::complex<double>(double)> custom_;
  double mean_ = 0.0;
  double radius_ = 0.0;
};

std::complex<double> eval_cf(const ProductCF& p, std::span<const double> t);

/// Trapezoid nodes t_m = m·h, m = 1..M with M = floor(T/h).
struct InversionSettings {
  double T = 0.0;  ///< 0 selects the automatic rule
  double h = 0.0;  ///< 0 selects the automatic rule
  double x_extent = 0.0;  ///< largest |x − E S| the grid must serve exactly (auto h)
  std::size_t max_points = std::size_t{1} << 20;
  double tail_tolerance = 1e-14;
};

/// Precomputed φ(m·h); evaluates Gil–Pelaez CDFs at any x in O(M).
class InversionGrid {
 public:
  /// Explicit (T, h).
  InversionGrid(const ProductCF& p, double T, double h);
  /// Automatic rule: h = π/(R + x_extent) so that |S − x| < 2π/h and the
  /// trapezoid sum has no aliasing; T starts at 64 and doubles until
  /// max |φ| over [T/2, T] falls below tail_tolerance or max_points is hit.
  InversionGrid(const ProductCF& p, const InversionSettings& settings);

  double T() const { return h_ * static_cast<double>(phi_.size()); }
  double h() const { return h_; }
  std::size_t points() const { return phi_.size(); }
  /// max |φ(t)| over the last half of the grid.
  double tail_magnitude() const { return tail_; }
  /// Heuristic size of the neglected tail plus the aliasing allowance.
  double error_estimate() const;

  /// F(x) = ½ − (1/π)∫₀^T Im[e^{−itx}φ(t)]/t dt by the trapezoid rule,
  /// clamped to [0, 1]. At an atom the value is the midpoint of the jump.
  double cdf(double x) const;

 private:
  void fill(const ProductCF& p, std::size_t from, std::size_t to);

  double h_ = 0.0;
  double mean_ = 0.0;
  std::vector<std::complex<double>> phi_;
  double tail_ = 0.0;
};

double cdf_1d(const ProductCF& p, double x, double T, double h);
/// Automatic (T, h).
double cdf_1d(const ProductCF& p, double x);

struct KolmogorovResult {
  double value = 0.0;
  double witness = 0.0;  ///< x at which the supremum was attained
  bool discrete_path = false;  ///< support enumerated; one-sided limits used
  double error_estimate = 0.0;
};

/// Largest support (distinct atoms) handled by the one-sided atom path.
inline constexpr std::size_t kAtomPathCap = 512;

/// sup_x |F_S(x) − Φ(x)| over `grid` plus atom-adjacent points. When the
/// support of S has at most kAtomPathCap atoms, F is evaluated on every flat
/// piece and compared with Φ at both ends, which captures both one-sided
/// limits. Otherwise F is treated as continuous and the grid maximum is
/// refined by golden-section search. An empty grid selects 4001 points on
/// [−8, 8].
KolmogorovResult kolmogorov_distance_1d(const ProductCF& p, std::span<const double> grid = {},
                                        const InversionSettings& settings = {});

/// Kolmogorov distance of an explicit sorted atom list to Φ.
KolmogorovResult kolmogorov_distance_atoms(std::span<const std::pair<double, double>> atoms);

}  // namespace wclt
