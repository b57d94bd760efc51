#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "wclt/distribution.hpp"
#include "wclt/multiindex.hpp"

namespace wclt {

/// Dense map MultiIndex (order ≤ max_order) → real, laid out in graded
/// lexicographic order. Immutable after construction.
template <class Tag>
class IndexTable {
 public:
  IndexTable(std::size_t dimension, unsigned max_order,
             const std::function<double(const MultiIndex&)>& fill)
      : dimension_(dimension), max_order_(max_order), indices_(enumerate_up_to(dimension, max_order)) {
    values_.reserve(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      position_.emplace(indices_[i], i);
      values_.push_back(fill(indices_[i]));
    }
  }

  std::size_t dimension() const { return dimension_; }
  unsigned max_order() const { return max_order_; }
  std::span<const MultiIndex> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  bool covers(const MultiIndex& nu) const {
    return nu.dimension() == dimension_ && nu.order() <= max_order_;
  }

  /// Throws InsufficientOrder when the index lies beyond max_order.
  double at(const MultiIndex& nu) const;
  double operator[](const MultiIndex& nu) const { return at(nu); }

 private:
  std::size_t dimension_;
  unsigned max_order_;
  std::vector<MultiIndex> indices_;
  std::vector<double> values_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> position_;
};

struct MomentTag {};
struct CumulantTag {};
using MomentTable = IndexTable<MomentTag>;
using CumulantTable = IndexTable<CumulantTag>;

extern template class IndexTable<MomentTag>;
extern template class IndexTable<CumulantTag>;

/// μ_ν = Σ prob · point^ν for every |ν| ≤ s.
MomentTable exact_moments(const DistributionSpec& d, unsigned s);

/// ρ_s = E‖X‖^s for any real s ≥ 1.
double absolute_moment(const DistributionSpec& d, double s);

/// Cumulants from moments through the log-series recursion
///   μ_ν = Σ_{0 ≤ β ≤ ν−e} C(ν−e, β) κ_{β+e} μ_{ν−e−β},
/// where e is the unit index of the first nonzero coordinate of ν.
CumulantTable cumulants_from_moments(const MomentTable& m);
/// The same recursion run forward.
MomentTable moments_from_cumulants(const CumulantTable& c);

/// Constants c(ν) with |κ_ν| ≤ c(ν)·ρ_{|ν|} for every law: the recursion
/// above with every moment replaced by its absolute bound.
CumulantTable cumulant_bound_constants(std::size_t k, unsigned s);

/// Σ_j θ_j^{|ν|} κ_ν(Z_j). `tables` has one entry per weight, or a single
/// shared table for identically distributed summands.
double weighted_cumulant(std::span<const CumulantTable> tables, std::span<const double> theta,
                         const MultiIndex& nu);
/// Full cumulant table of the weighted sum through order s.
CumulantTable weighted_cumulants(std::span<const CumulantTable> tables,
                                 std::span<const double> theta, unsigned s);

/// κ_r(t) = Σ_{|ν|=r} κ_ν t^ν / ν!.
double kappa_r_poly(const CumulantTable& weighted, unsigned r, std::span<const double> t);

/// ρ_r = Σ_j E‖θ_j Z_j‖^r over a weighted collection of atom laws.
double weighted_absolute_moment(std::span<const DistributionSpec> laws,
                                std::span<const double> theta, double r);

/// r ↦ (ρ_r / ρ_2^{r/2})^{1/(r−2)} for integer r in [3, s].
std::vector<double> moment_ratio_profile(std::span<const DistributionSpec> laws,
                                         std::span<const double> theta, unsigned s);

/// Exact law of X + Y for independent atom laws (atoms not merged).
DistributionSpec convolve(const DistributionSpec& x, const DistributionSpec& y,
                          bool allow_unnormalized = true);

}  // namespace wclt
