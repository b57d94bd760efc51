#include "wclt/moments.hpp"

#include <cmath>
#include <string>

#include "wclt/error.hpp"

namespace wclt {

template <class Tag>
double IndexTable<Tag>::at(const MultiIndex& nu) const {
  const auto it = position_.find(nu);
  if (it == position_.end()) {
    throw InsufficientOrder("table of dimension " + std::to_string(dimension_) + " and order " +
                            std::to_string(max_order_) + " does not cover index (" +
                            nu.to_string() + ")");
  }
  return values_[it->second];
}

template class IndexTable<MomentTag>;
template class IndexTable<CumulantTag>;

namespace {

std::size_t first_nonzero(const MultiIndex& nu) {
  for (std::size_t i = 0; i < nu.dimension(); ++i) {
    if (nu[i] > 0) return i;
  }
  return nu.dimension();
}

void check_order(unsigned s) {
  if (s > MultiIndex::kMaxOrder) {
    throw InsufficientOrder("maximum supported order is " + std::to_string(MultiIndex::kMaxOrder) +
                            ", requested " + std::to_string(s));
  }
}

}  // namespace

MomentTable exact_moments(const DistributionSpec& d, unsigned s) {
  check_order(s);
  return MomentTable(d.dimension(), s, [&](const MultiIndex& nu) {
    double m = 0.0;
    for (const auto& a : d.atoms()) m += a.prob * power(a.point, nu);
    return m;
  });
}

double absolute_moment(const DistributionSpec& d, double s) {
  if (!(s >= 1.0)) throw Error("absolute_moment: order must be >= 1");
  double total = 0.0;
  for (const auto& a : d.atoms()) {
    double r2 = 0.0;
    for (double v : a.point) r2 += v * v;
    total += a.prob * std::pow(std::sqrt(r2), s);
  }
  return total;
}

CumulantTable cumulants_from_moments(const MomentTable& m) {
  if (m.max_order() < 2) throw InsufficientOrder("cumulants need moments through order 2");
  std::unordered_map<MultiIndex, double, MultiIndexHash> kappa;
  // Indices are visited in graded order, so every κ on the right is ready.
  for (const auto& nu : m.indices()) {
    if (nu.order() == 0) {
      kappa[nu] = 0.0;
      continue;
    }
    const MultiIndex e = MultiIndex::unit(nu.dimension(), first_nonzero(nu));
    const MultiIndex rest = nu - e;
    double value = m[nu];
    for (const auto& beta : enumerate_below(rest)) {
      if (beta == rest) continue;
      value -= binomial(rest, beta) * kappa.at(beta + e) * m[rest - beta];
    }
    kappa[nu] = value / m[MultiIndex::zero(nu.dimension())];
  }
  return CumulantTable(m.dimension(), m.max_order(),
                       [&](const MultiIndex& nu) { return kappa.at(nu); });
}

MomentTable moments_from_cumulants(const CumulantTable& c) {
  std::unordered_map<MultiIndex, double, MultiIndexHash> mu;
  for (const auto& nu : c.indices()) {
    if (nu.order() == 0) {
      mu[nu] = 1.0;
      continue;
    }
    const MultiIndex e = MultiIndex::unit(nu.dimension(), first_nonzero(nu));
    const MultiIndex rest = nu - e;
    double value = 0.0;
    for (const auto& beta : enumerate_below(rest)) {
      value += binomial(rest, beta) * c[beta + e] * mu.at(rest - beta);
    }
    mu[nu] = value;
  }
  return MomentTable(c.dimension(), c.max_order(), [&](const MultiIndex& nu) { return mu.at(nu); });
}

CumulantTable cumulant_bound_constants(std::size_t k, unsigned s) {
  check_order(s);
  // |μ_α| ≤ ρ_{|α|} and ρ_a ρ_b ≤ ρ_{a+b} for probability laws, so every
  // product in the recursion is bounded by ρ_{|ν|} times its coefficient.
  std::unordered_map<MultiIndex, double, MultiIndexHash> c;
  for (const auto& nu : enumerate_up_to(k, s)) {
    if (nu.order() == 0) {
      c[nu] = 0.0;
      continue;
    }
    const MultiIndex e = MultiIndex::unit(k, first_nonzero(nu));
    const MultiIndex rest = nu - e;
    double value = 1.0;
    for (const auto& beta : enumerate_below(rest)) {
      if (beta == rest) continue;
      value += binomial(rest, beta) * c.at(beta + e);
    }
    c[nu] = value;
  }
  return CumulantTable(k, s, [&](const MultiIndex& nu) { return c.at(nu); });
}

double weighted_cumulant(std::span<const CumulantTable> tables, std::span<const double> theta,
                         const MultiIndex& nu) {
  if (tables.empty()) throw DimensionMismatch("weighted_cumulant: no cumulant tables");
  if (tables.size() != 1 && tables.size() != theta.size()) {
    throw DimensionMismatch("weighted_cumulant: " + std::to_string(tables.size()) +
                            " tables for " + std::to_string(theta.size()) + " weights");
  }
  const unsigned order = nu.order();
  if (tables.size() == 1) {
    double weight_sum = 0.0;
    for (double t : theta) weight_sum += std::pow(t, order);
    return weight_sum * tables.front().at(nu);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) total += std::pow(theta[j], order) * tables[j].at(nu);
  return total;
}

CumulantTable weighted_cumulants(std::span<const CumulantTable> tables,
                                 std::span<const double> theta, unsigned s) {
  if (tables.empty()) throw DimensionMismatch("weighted_cumulants: no cumulant tables");
  return CumulantTable(tables.front().dimension(), s, [&](const MultiIndex& nu) {
    return weighted_cumulant(tables, theta, nu);
  });
}

double kappa_r_poly(const CumulantTable& weighted, unsigned r, std::span<const double> t) {
  if (t.size() != weighted.dimension()) {
    throw DimensionMismatch("kappa_r_poly: argument dimension " + std::to_string(t.size()) +
                            " vs table dimension " + std::to_string(weighted.dimension()));
  }
  if (r > weighted.max_order()) {
    throw InsufficientOrder("kappa_r_poly: order " + std::to_string(r) + " not covered");
  }
  double total = 0.0;
  for (const auto& nu : enumerate_order(weighted.dimension(), r)) {
    total += weighted[nu] * power(t, nu) / static_cast<double>(nu.factorial());
  }
  return total;
}

double weighted_absolute_moment(std::span<const DistributionSpec> laws,
                                std::span<const double> theta, double r) {
  if (laws.size() != 1 && laws.size() != theta.size()) {
    throw DimensionMismatch("weighted_absolute_moment: law count does not match weights");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const auto& law = laws.size() == 1 ? laws.front() : laws[j];
    total += std::pow(std::abs(theta[j]), r) * absolute_moment(law, r);
  }
  return total;
}

std::vector<double> moment_ratio_profile(std::span<const DistributionSpec> laws,
                                         std::span<const double> theta, unsigned s) {
  const double rho2 = weighted_absolute_moment(laws, theta, 2.0);
  std::vector<double> profile;
  for (unsigned r = 3; r <= s; ++r) {
    const double rho_r = weighted_absolute_moment(laws, theta, r);
    profile.push_back(std::pow(rho_r / std::pow(rho2, 0.5 * r), 1.0 / (r - 2.0)));
  }
  return profile;
}

DistributionSpec convolve(const DistributionSpec& x, const DistributionSpec& y,
                          bool allow_unnormalized) {
  if (x.dimension() != y.dimension()) throw DimensionMismatch("convolve: dimensions differ");
  std::vector<Atom> atoms;
  atoms.reserve(x.atoms().size() * y.atoms().size());
  for (const auto& a : x.atoms()) {
    for (const auto& b : y.atoms()) {
      Atom sum{a.point, a.prob * b.prob};
      for (std::size_t i = 0; i < sum.point.size(); ++i) sum.point[i] += b.point[i];
      atoms.push_back(std::move(sum));
    }
  }
  return DistributionSpec(x.dimension(), std::move(atoms), x.label() + "*" + y.label(),
                          allow_unnormalized);
}

}  // namespace wclt
