#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace wclt {

/// Nonnegative integer exponent vector over dimension k. Indexes moments,
/// cumulants, monomials and partial derivatives. Immutable after construction.
class MultiIndex {
 public:
  /// Largest order for which factorial() is guaranteed representable.
  static constexpr unsigned kMaxOrder = 12;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<unsigned> entries);
  explicit MultiIndex(std::vector<unsigned> entries);

  static MultiIndex zero(std::size_t dimension);
  static MultiIndex unit(std::size_t dimension, std::size_t axis);

  std::size_t dimension() const { return entries_.size(); }
  unsigned operator[](std::size_t i) const { return entries_[i]; }
  std::span<const unsigned> entries() const { return entries_; }

  unsigned order() const;
  std::uint64_t factorial() const;

  /// Componentwise β ≤ α.
  bool leq(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; requires other.leq(*this).
  MultiIndex operator-(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const = default;
  /// Graded lexicographic: lower order first, then larger leading entries first.
  bool graded_before(const MultiIndex& other) const;
  /// Strict weak ordering for ordered containers (same as graded_before).
  bool operator<(const MultiIndex& other) const { return graded_before(other); }

  /// Comma-joined entries, e.g. "2,0,1".
  std::string to_string() const;
  static MultiIndex parse(const std::string& text);

 private:
  std::vector<unsigned> entries_;
};

/// Π_i t_i^{ν_i}, with 0^0 = 1.
double power(std::span<const double> t, const MultiIndex& nu);
std::complex<double> power(std::span<const std::complex<double>> z, const MultiIndex& nu);

/// Π_i C(α_i, β_i); requires β ≤ α.
double binomial(const MultiIndex& alpha, const MultiIndex& beta);

/// All indices of dimension k with order exactly r, graded lexicographic.
std::vector<MultiIndex> enumerate_order(std::size_t k, unsigned r);

/// All indices of dimension k with order ≤ s, grouped by order.
std::vector<MultiIndex> enumerate_up_to(std::size_t k, unsigned s);

/// All β with 0 ≤ β ≤ α, in lexicographic order of entries.
std::vector<MultiIndex> enumerate_below(const MultiIndex& alpha);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& nu) const noexcept;
};

}  // namespace wclt
