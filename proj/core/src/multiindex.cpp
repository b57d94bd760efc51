#include "wclt/multiindex.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "wclt/error.hpp"

namespace wclt {

namespace {

void require_same_dimension(const MultiIndex& a, const MultiIndex& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("multi-index dimensions differ: " + std::to_string(a.dimension()) +
                            " vs " + std::to_string(b.dimension()));
  }
}

// Fills `current` from position `pos` with entries summing to `remaining`,
// largest leading entry first.
void compositions(std::size_t pos, unsigned remaining, std::vector<unsigned>& current,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (unsigned v = remaining + 1; v-- > 0;) {
    current[pos] = v;
    compositions(pos + 1, remaining - v, current, out);
  }
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<unsigned> entries) : entries_(entries) {
  if (entries_.empty()) throw DimensionMismatch("multi-index needs dimension >= 1");
}

MultiIndex::MultiIndex(std::vector<unsigned> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionMismatch("multi-index needs dimension >= 1");
}

MultiIndex MultiIndex::zero(std::size_t dimension) {
  return MultiIndex(std::vector<unsigned>(dimension, 0U));
}

MultiIndex MultiIndex::unit(std::size_t dimension, std::size_t axis) {
  std::vector<unsigned> e(dimension, 0U);
  e.at(axis) = 1;
  return MultiIndex(std::move(e));
}

unsigned MultiIndex::order() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0U);
}

std::uint64_t MultiIndex::factorial() const {
  std::uint64_t result = 1;
  for (unsigned e : entries_) {
    for (unsigned f = 2; f <= e; ++f) {
      if (result > std::numeric_limits<std::uint64_t>::max() / f) {
        throw OverflowError("multi-index factorial overflows 64 bits for " + to_string());
      }
      result *= f;
    }
  }
  return result;
}

bool MultiIndex::leq(const MultiIndex& other) const {
  require_same_dimension(*this, other);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] > other.entries_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require_same_dimension(*this, other);
  std::vector<unsigned> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.leq(*this)) {
    throw DimensionMismatch("multi-index subtraction " + to_string() + " - " + other.to_string() +
                            " leaves negative entries");
  }
  std::vector<unsigned> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.entries_[i];
  return MultiIndex(std::move(e));
}

bool MultiIndex::graded_before(const MultiIndex& other) const {
  if (entries_.size() != other.entries_.size()) return entries_.size() < other.entries_.size();
  const unsigned a = order();
  const unsigned b = other.order();
  if (a != b) return a < b;
  return std::lexicographical_compare(other.entries_.begin(), other.entries_.end(),
                                      entries_.begin(), entries_.end());
}

std::string MultiIndex::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(entries_[i]);
  }
  return s;
}

MultiIndex MultiIndex::parse(const std::string& text) {
  std::vector<unsigned> e;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = -1;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw ParseError("bad multi-index entry '" + item + "'");
    }
    if (v < 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ParseError("bad multi-index entry '" + item + "'");
    }
    e.push_back(static_cast<unsigned>(v));
  }
  if (e.empty()) throw ParseError("empty multi-index");
  return MultiIndex(std::move(e));
}

double power(std::span<const double> t, const MultiIndex& nu) {
  if (t.size() != nu.dimension()) {
    throw DimensionMismatch("power: vector has " + std::to_string(t.size()) +
                            " entries, index has " + std::to_string(nu.dimension()));
  }
  double p = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (unsigned e = 0; e < nu[i]; ++e) p *= t[i];
  }
  return p;
}

std::complex<double> power(std::span<const std::complex<double>> z, const MultiIndex& nu) {
  if (z.size() != nu.dimension()) {
    throw DimensionMismatch("power: vector has " + std::to_string(z.size()) +
                            " entries, index has " + std::to_string(nu.dimension()));
  }
  std::complex<double> p = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (unsigned e = 0; e < nu[i]; ++e) p *= z[i];
  }
  return p;
}

double binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  if (!beta.leq(alpha)) return 0.0;
  double c = 1.0;
  for (std::size_t i = 0; i < alpha.dimension(); ++i) {
    const unsigned n = alpha[i];
    const unsigned k = std::min(beta[i], n - beta[i]);
    for (unsigned j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  }
  return c;
}

std::vector<MultiIndex> enumerate_order(std::size_t k, unsigned r) {
  if (k == 0) throw DimensionMismatch("enumerate_order needs k >= 1");
  std::vector<MultiIndex> out;
  std::vector<unsigned> current(k, 0U);
  compositions(0, r, current, out);
  return out;
}

std::vector<MultiIndex> enumerate_up_to(std::size_t k, unsigned s) {
  std::vector<MultiIndex> out;
  for (unsigned r = 0; r <= s; ++r) {
    auto level = enumerate_order(k, r);
    out.insert(out.end(), std::make_move_iterator(level.begin()),
               std::make_move_iterator(level.end()));
  }
  return out;
}

std::vector<MultiIndex> enumerate_below(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  std::vector<unsigned> current(alpha.dimension(), 0U);
  while (true) {
    out.emplace_back(current);
    std::size_t i = alpha.dimension();
    while (i-- > 0) {
      if (current[i] < alpha[i]) {
        ++current[i];
        break;
      }
      current[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::size_t MultiIndexHash::operator()(const MultiIndex& nu) const noexcept {
  std::size_t h = nu.dimension() * 0x9e3779b97f4a7c15ULL;
  for (unsigned e : nu.entries()) {
    h ^= std::hash<unsigned>{}(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace wclt
