#include "wclt/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "wclt/error.hpp"
#include "wclt/special.hpp"

namespace wclt {

namespace {

constexpr double kAliasEpsilon = 1e-16;

std::complex<double> int_power(std::complex<double> base, std::size_t e) {
  std::complex<double> result = 1.0;
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

double int_power(double base, std::size_t e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

}  // namespace

ProductCF::ProductCF(const DistributionSpec& law, std::span<const double> theta)
    : dimension_(law.dimension()), laws_{law} {
  build(theta, std::vector<std::size_t>(theta.size(), 0));
}

ProductCF::ProductCF(std::vector<DistributionSpec> laws, std::span<const double> theta)
    : laws_(std::move(laws)) {
  if (laws_.size() != theta.size()) {
    throw DimensionMismatch("ProductCF: " + std::to_string(laws_.size()) + " laws for " +
                            std::to_string(theta.size()) + " weights");
  }
  if (laws_.empty()) throw DimensionMismatch("ProductCF needs at least one summand");
  dimension_ = laws_.front().dimension();
  std::vector<std::size_t> law_of(theta.size());
  for (std::size_t j = 0; j < law_of.size(); ++j) {
    if (laws_[j].dimension() != dimension_) throw DimensionMismatch("ProductCF: mixed dimensions");
    law_of[j] = j;
  }
  build(theta, law_of);
}

ProductCF ProductCF::from_function(std::function<std::complex<double>(double)> phi, double mean,
                                   double radius) {
  ProductCF p;
  p.dimension_ = 1;
  p.summand_count_ = 1;
  p.custom_ = std::move(phi);
  p.mean_ = mean;
  p.radius_ = radius;
  return p;
}

void ProductCF::build(std::span<const double> theta, const std::vector<std::size_t>& law_of) {
  if (theta.empty()) throw DimensionMismatch("ProductCF needs at least one summand");
  summand_count_ = theta.size();
  std::map<std::pair<std::size_t, double>, std::size_t> multiplicity;
  for (std::size_t j = 0; j < theta.size(); ++j) ++multiplicity[{law_of[j], theta[j]}];
  for (const auto& [key, count] : multiplicity) groups_.push_back({key.first, key.second, count});

  if (dimension_ != 1) return;

  double hard = 0.0;
  double width2 = 0.0;
  for (const auto& law : laws_) {
    FoldedLaw f;
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : law.atoms()) atoms.emplace_back(a.point[0], a.prob);
    std::sort(atoms.begin(), atoms.end());
    f.symmetric = true;
    for (std::size_t i = 0, j = atoms.size(); i < j--; ++i) {
      if (std::abs(atoms[i].first + atoms[j].first) > 1e-15 ||
          std::abs(atoms[i].second - atoms[j].second) > 1e-15) {
        f.symmetric = false;
        break;
      }
    }
    if (f.symmetric) {
      for (const auto& [x, p] : atoms) {
        if (x > 0.0) f.terms.emplace_back(x, 2.0 * p);
        if (x == 0.0) f.terms.emplace_back(0.0, p);
      }
    } else {
      f.terms = atoms;
    }
    folded_.push_back(std::move(f));
  }
  for (const auto& g : groups_) {
    const auto& law = laws_[g.law];
    double lo = law.atoms().front().point[0];
    double hi = lo;
    double m = 0.0;
    for (const auto& a : law.atoms()) {
      lo = std::min(lo, a.point[0]);
      hi = std::max(hi, a.point[0]);
      m += a.prob * a.point[0];
    }
    const double w = static_cast<double>(g.multiplicity);
    mean_ += w * g.weight * m;
    hard += w * std::abs(g.weight) * std::max(hi - m, m - lo);
    width2 += w * g.weight * g.weight * (hi - lo) * (hi - lo);
  }
  const double hoeffding = std::sqrt(0.5 * width2 * std::log(2.0 / kAliasEpsilon));
  radius_ = std::min(hard, hoeffding);
}

std::complex<double> ProductCF::eval_1d(double t) const {
  if (custom_) return custom_(t);
  if (dimension_ != 1) throw DimensionMismatch("eval_1d on a multivariate characteristic function");
  double real_part = 1.0;
  std::complex<double> complex_part = 1.0;
  for (const auto& g : groups_) {
    const auto& f = folded_[g.law];
    const double s = g.weight * t;
    if (f.symmetric) {
      double v = 0.0;
      for (const auto& [x, p] : f.terms) v += p * std::cos(s * x);
      real_part *= g.multiplicity == 1 ? v : int_power(v, g.multiplicity);
    } else {
      std::complex<double> v = 0.0;
      for (const auto& [x, p] : f.terms) v += p * std::polar(1.0, s * x);
      complex_part *= g.multiplicity == 1 ? v : int_power(v, g.multiplicity);
    }
    if (std::abs(real_part) < 1e-300) return 0.0;
  }
  return real_part * complex_part;
}

std::complex<double> ProductCF::operator()(std::span<const double> t) const {
  if (t.size() != dimension_) {
    throw DimensionMismatch("characteristic function argument has dimension " +
                            std::to_string(t.size()) + ", expected " +
                            std::to_string(dimension_));
  }
  if (dimension_ == 1) return eval_1d(t[0]);
  std::complex<double> result = 1.0;
  for (const auto& g : groups_) {
    std::complex<double> v = 0.0;
    for (const auto& a : laws_[g.law].atoms()) {
      double phase = 0.0;
      for (std::size_t i = 0; i < dimension_; ++i) phase += t[i] * a.point[i];
      v += a.prob * std::polar(1.0, g.weight * phase);
    }
    result *= int_power(v, g.multiplicity);
  }
  return result;
}

std::optional<std::vector<std::pair<double, double>>> ProductCF::exact_support_1d(
    std::size_t cap) const {
  if (custom_ || dimension_ != 1) return std::nullopt;
  const double tolerance = 1e-12 * std::max(1.0, radius_ + std::abs(mean_));
  std::vector<std::pair<double, double>> support{{0.0, 1.0}};
  std::vector<std::pair<double, double>> next;
  std::vector<std::pair<double, double>> merged;
  for (const auto& g : groups_) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : laws_[g.law].atoms()) atoms.emplace_back(g.weight * a.point[0], a.prob);
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t rep = 0; rep < g.multiplicity; ++rep) {
      if (support.size() * atoms.size() > 8 * cap) return std::nullopt;
      next.clear();
      for (const auto& [shift, p] : atoms) {
        merged.clear();
        merged.reserve(support.size());
        for (const auto& [s, q] : support) merged.emplace_back(s + shift, q * p);
        const auto mid = static_cast<std::ptrdiff_t>(next.size());
        next.insert(next.end(), merged.begin(), merged.end());
        std::inplace_merge(next.begin(), next.begin() + mid, next.end());
      }
      support.clear();
      for (const auto& atom : next) {
        if (!support.empty() && atom.first - support.back().first <= tolerance) {
          support.back().second += atom.second;
        } else {
          support.push_back(atom);
        }
      }
      if (support.size() > cap) return std::nullopt;
    }
  }
  return support;
}

std::complex<double> eval_cf(const ProductCF& p, std::span<const double> t) { return p(t); }

InversionGrid::InversionGrid(const ProductCF& p, double T, double h) : h_(h), mean_(p.mean_1d()) {
  if (p.dimension() != 1) throw DimensionMismatch("CDF inversion requires k = 1");
  if (!(T > 0.0) || !(h > 0.0)) throw Error("inversion needs T > 0 and h > 0");
  const auto m = static_cast<std::size_t>(std::floor(T / h));
  fill(p, 0, std::max<std::size_t>(m, 1));
}

InversionGrid::InversionGrid(const ProductCF& p, const InversionSettings& s) : mean_(p.mean_1d()) {
  if (p.dimension() != 1) throw DimensionMismatch("CDF inversion requires k = 1");
  const double radius = std::max(p.support_radius(), 1e-3);
  const double extent = s.x_extent > 0.0 ? s.x_extent : radius;
  h_ = s.h > 0.0 ? s.h : std::numbers::pi / (radius + extent);
  if (s.T > 0.0) {
    fill(p, 0, std::max<std::size_t>(static_cast<std::size_t>(std::floor(s.T / h_)), 1));
    return;
  }
  std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(64.0 / h_)), s.max_points);
  fill(p, 0, m);
  while (tail_ > s.tail_tolerance && m < s.max_points) {
    const std::size_t grown = std::min(2 * m, s.max_points);
    fill(p, m, grown);
    m = grown;
  }
}

void InversionGrid::fill(const ProductCF& p, std::size_t from, std::size_t to) {
  phi_.resize(to);
  for (std::size_t m = from; m < to; ++m) {
    const double t = static_cast<double>(m + 1) * h_;
    const auto v = p.eval_1d(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError("non-finite characteristic function value at t = " + std::to_string(t));
    }
    phi_[m] = v;
  }
  tail_ = 0.0;
  for (std::size_t m = to / 2; m < to; ++m) tail_ = std::max(tail_, std::abs(phi_[m]));
}

double InversionGrid::error_estimate() const { return tail_ / std::numbers::pi + kAliasEpsilon; }

double InversionGrid::cdf(double x) const {
  // Σ_m Im[e^{−imhx} φ_m]/m with the rotation re-seeded every 256 steps.
  const std::complex<double> step = std::polar(1.0, -h_ * x);
  std::complex<double> rot = step;
  double sum = 0.0;
  const std::size_t count = phi_.size();
  for (std::size_t m = 1; m <= count; ++m) {
    if ((m & 255U) == 0) rot = std::polar(1.0, -static_cast<double>(m) * h_ * x);
    sum += (rot * phi_[m - 1]).imag() / static_cast<double>(m);
    rot *= step;
  }
  const double integral = 0.5 * h_ * (mean_ - x) + sum;
  const double value = 0.5 - integral / std::numbers::pi;
  if (!std::isfinite(value)) {
    throw NumericalError("non-finite CDF value at x = " + std::to_string(x));
  }
  return std::clamp(value, 0.0, 1.0);
}

double cdf_1d(const ProductCF& p, double x, double T, double h) {
  return InversionGrid(p, T, h).cdf(x);
}

double cdf_1d(const ProductCF& p, double x) {
  InversionSettings s;
  s.x_extent = std::max(p.support_radius(), std::abs(x - p.mean_1d()));
  return InversionGrid(p, s).cdf(x);
}

KolmogorovResult kolmogorov_distance_atoms(std::span<const std::pair<double, double>> atoms) {
  KolmogorovResult r;
  r.discrete_path = true;
  double below = 0.0;
  for (const auto& [x, p] : atoms) {
    const double phi = normal_cdf(x);
    const double left = std::abs(below - phi);
    below += p;
    const double right = std::abs(below - phi);
    if (std::max(left, right) > r.value) {
      r.value = std::max(left, right);
      r.witness = x;
    }
  }
  return r;
}

KolmogorovResult kolmogorov_distance_1d(const ProductCF& p, std::span<const double> grid,
                                        const InversionSettings& settings) {
  if (p.dimension() != 1) throw DimensionMismatch("kolmogorov_distance_1d requires k = 1");
  KolmogorovResult r;

  if (const auto support = p.exact_support_1d(kAtomPathCap)) {
    // F is constant on each gap between atoms; Φ is monotone, so the supremum
    // over a gap is attained at one of its ends (one-sided limits).
    const auto& atoms = *support;
    InversionSettings s = settings;
    s.x_extent = std::max(std::abs(atoms.front().first - 1.0 - p.mean_1d()),
                          std::abs(atoms.back().first + 1.0 - p.mean_1d()));
    const InversionGrid inv(p, s);
    r.discrete_path = true;
    r.error_estimate = inv.error_estimate();
    auto consider = [&](double f, double x) {
      const double d = std::abs(f - normal_cdf(x));
      if (d > r.value) {
        r.value = d;
        r.witness = x;
      }
    };
    consider(inv.cdf(atoms.front().first - 1.0), atoms.front().first);
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
      const double f = inv.cdf(0.5 * (atoms[i].first + atoms[i + 1].first));
      consider(f, atoms[i].first);
      consider(f, atoms[i + 1].first);
    }
    consider(inv.cdf(atoms.back().first + 1.0), atoms.back().first);
    return r;
  }

  std::vector<double> xs(grid.begin(), grid.end());
  if (xs.empty()) {
    xs.resize(4001);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -8.0 + 16.0 * i / (xs.size() - 1);
  }
  InversionSettings s = settings;
  double extent = 0.0;
  for (double x : xs) extent = std::max(extent, std::abs(x - p.mean_1d()));
  s.x_extent = extent;
  const InversionGrid inv(p, s);
  r.error_estimate = inv.error_estimate();
  auto deviation = [&](double x) { return std::abs(inv.cdf(x) - normal_cdf(x)); };

  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = deviation(xs[i]);
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool left_ok = i == 0 || dev[i] >= dev[i - 1];
    const bool right_ok = i + 1 == xs.size() || dev[i] >= dev[i + 1];
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    return dev[a] != dev[b] ? dev[a] > dev[b] : a < b;
  });
  if (peaks.size() > 6) peaks.resize(6);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (dev[i] > r.value) {
      r.value = dev[i];
      r.witness = xs[i];
    }
  }
  constexpr double kGolden = 0.6180339887498949;
  for (std::size_t i : peaks) {
    double a = xs[i == 0 ? 0 : i - 1];
    double b = xs[i + 1 == xs.size() ? i : i + 1];
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = deviation(c);
    double fd = deviation(d);
    for (int it = 0; it < 48; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGolden * (b - a);
        fc = deviation(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGolden * (b - a);
        fd = deviation(d);
      }
    }
    const double best_x = fc > fd ? c : d;
    const double best = std::max(fc, fd);
    if (best > r.value) {
      r.value = best;
      r.witness = best_x;
    }
  }
  return r;
}

}  // namespace wclt
