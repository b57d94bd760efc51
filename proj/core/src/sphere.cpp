#include "wclt/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "wclt/error.hpp"
#include "wclt/moments.hpp"
#include "wclt/parallel.hpp"
#include "wclt/truncation.hpp"

namespace wclt {

WeightVector WeightVector::explicit_weights(std::vector<double> theta) {
  if (theta.empty()) throw DimensionMismatch("weight vector must have n >= 1 entries");
  double s = 0.0;
  for (double v : theta) s += v * v;
  if (std::abs(s - 1.0) > kUnitTolerance) {
    throw NormalizationError("weights are not on the unit sphere: sum of squares = " +
                             std::to_string(s));
  }
  return WeightVector(std::move(theta), WeightProvenance::explicit_weights, std::nullopt);
}

double WeightVector::max_abs() const {
  double m = 0.0;
  for (double v : theta_) m = std::max(m, std::abs(v));
  return m;
}

double WeightVector::l1_norm() const {
  double s = 0.0;
  for (double v : theta_) s += std::abs(v);
  return s;
}

std::string WeightVector::describe() const {
  switch (provenance_) {
    case WeightProvenance::equal_weights:
      return "equal";
    case WeightProvenance::sampled:
      return "sampled:" + std::to_string(*seed_);
    case WeightProvenance::explicit_weights:
      break;
  }
  return "explicit";
}

WeightVector sample_uniform(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw DimensionMismatch("sample_uniform needs n >= 1");
  std::vector<double> theta(n);
  for (std::uint64_t substream = 0;; ++substream) {
    Rng rng(seed, stream, substream);
    double norm2 = 0.0;
    for (auto& v : theta) {
      v = rng.normal();
      norm2 += v * v;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : theta) v *= inv;
      return WeightVector(std::move(theta), WeightProvenance::sampled, seed);
    }
    std::clog << "sample_uniform: zero Gaussian draw for seed " << seed << " stream " << stream
              << ", resampling on substream " << substream + 1 << '\n';
  }
}

WeightVector equal_weights(std::size_t n) {
  if (n == 0) throw DimensionMismatch("equal_weights needs n >= 1");
  return WeightVector(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))),
                      WeightProvenance::equal_weights, std::nullopt);
}

ThetaStats theta_stats(const WeightVector& theta, std::span<const double> delta4) {
  if (delta4.size() != 1 && delta4.size() != theta.size()) {
    throw DimensionMismatch("theta_stats: " + std::to_string(delta4.size()) +
                            " fourth moments for " + std::to_string(theta.size()) + " weights");
  }
  ThetaStats s{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double t = theta[j];
    const double t2 = t * t;
    s.delta_theta4 += t2 * t2 * (delta4.size() == 1 ? delta4[0] : delta4[j]);
    s.sum_theta3 += t2 * t;
  }
  s.sum_theta4_weighted = s.delta_theta4;
  return s;
}

ExponentFit fit_tail_exponent(std::span<const double> t, std::span<const double> p, double lo,
                              double hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && p[i] >= lo && p[i] <= hi && p[i] < 1.0) {
      xs.push_back(std::log(t[i]));
      ys.push_back(std::log(-std::log(p[i])));
    }
  }
  ExponentFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.fitted = true;
  fit.exponent = sxy / sxx;
  fit.log_constant = my - fit.exponent * mx;
  return fit;
}

ConcentrationReport concentration_experiment(std::size_t n, std::size_t replicates,
                                             const DistributionSpec& d, const MultiIndex& nu,
                                             std::span<const double> t_grid, std::uint64_t seed,
                                             unsigned threads) {
  if (nu.order() != 3) throw Error("concentration_experiment needs |nu| = 3");
  if (nu.dimension() != d.dimension()) throw DimensionMismatch("nu and law dimension differ");
  if (replicates < 1000) throw Error("concentration_experiment needs at least 1000 replicates");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw Error("t grid must be strictly increasing");
  }

  const double delta4 = d.delta4();
  const double max_norm = d.max_atom_norm();
  // μ_ν(Z_j) when truncation is inactive: the source is centered, so Z_j = X_j.
  const double mu_plain = exact_moments(d, 3).at(nu);

  std::vector<double> s1(replicates);
  std::vector<double> s2(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const auto theta = sample_uniform(n, seed, r);
    double cubic = 0.0;
    double quartic = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = theta[j];
      double mu = mu_plain;
      if (std::abs(t) * max_norm > 1.0) {
        const auto z = truncate(d, t);
        mu = 0.0;
        for (const auto& a : z.z_atoms) mu += a.prob * power(a.point, nu);
      }
      cubic += t * t * t * mu;
      quartic += t * t * t * t * delta4;
    }
    s1[r] = static_cast<double>(n) * std::abs(cubic) / delta4;
    s2[r] = static_cast<double>(n) * quartic / delta4;
  });

  ConcentrationReport rep;
  rep.n = n;
  rep.replicates = replicates;
  rep.nu = nu;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  rep.max_s1 = *std::max_element(s1.begin(), s1.end());
  auto exceedance = [&](std::vector<double>& values, std::vector<double>& out) {
    std::sort(values.begin(), values.end());
    for (double t : t_grid) {
      const auto first = std::lower_bound(values.begin(), values.end(), t);
      out.push_back(static_cast<double>(values.end() - first) / static_cast<double>(replicates));
    }
  };
  exceedance(s1, rep.p_hat_s1);
  exceedance(s2, rep.p_hat_s2);

  const double lo = 10.0 / static_cast<double>(replicates);
  rep.s1_all_subcritical = rep.p_hat_s1.empty() || rep.p_hat_s1.front() == 0.0;
  rep.s2_all_subcritical = rep.p_hat_s2.empty() || rep.p_hat_s2.front() == 0.0;
  if (!rep.s1_all_subcritical) rep.fit_s1 = fit_tail_exponent(t_grid, rep.p_hat_s1, lo, 0.5);
  if (!rep.s2_all_subcritical) rep.fit_s2 = fit_tail_exponent(t_grid, rep.p_hat_s2, lo, 0.5);
  return rep;
}

}  // namespace wclt
