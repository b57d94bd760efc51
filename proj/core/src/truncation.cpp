#include "wclt/truncation.hpp"

#include <algorithm>
#include <cmath>

#include "wclt/error.hpp"

namespace wclt {

namespace {

double euclidean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> TruncatedSummand::z_covariance() const {
  const std::size_t k = y_mean.size();
  std::vector<double> c(k * k, 0.0);
  for (const auto& a : z_atoms) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) c[i * k + j] += a.prob * a.point[i] * a.point[j];
    }
  }
  return c;
}

DistributionSpec TruncatedSummand::z_law() const {
  return DistributionSpec(y_mean.size(), z_atoms, "truncated(" + source->label() + ")", true);
}

TruncatedSummand truncate(const DistributionSpec& d, double weight) {
  TruncatedSummand out;
  out.source = &d;
  out.weight = weight;
  const std::size_t k = d.dimension();
  out.y_mean.assign(k, 0.0);
  out.y_atoms.reserve(d.atoms().size());
  for (const auto& a : d.atoms()) {
    if (std::abs(weight) * euclidean(a.point) > 1.0) {
      out.y_atoms.push_back({std::vector<double>(k, 0.0), a.prob});
      out.excluded_mass += a.prob;
    } else {
      out.y_atoms.push_back(a);
      for (std::size_t i = 0; i < k; ++i) out.y_mean[i] += a.prob * a.point[i];
    }
  }
  out.z_atoms = out.y_atoms;
  for (auto& a : out.z_atoms) {
    for (std::size_t i = 0; i < k; ++i) a.point[i] -= out.y_mean[i];
  }
  return out;
}

NormalizationState normalization(std::span<const TruncatedSummand> summands) {
  if (summands.empty()) throw DimensionMismatch("normalization needs at least one summand");
  const std::size_t k = summands.front().y_mean.size();
  NormalizationState s;
  s.a_n.assign(k, 0.0);
  s.d = Matrix(k);
  for (const auto& z : summands) {
    if (z.y_mean.size() != k) throw DimensionMismatch("summands differ in dimension");
    const double w = z.weight;
    for (std::size_t i = 0; i < k; ++i) s.a_n[i] += w * z.y_mean[i];
    const auto cov = z.z_covariance();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) s.d(i, j) += w * w * cov[i * k + j];
    }
    s.delta_theta4 += w * w * w * w * z.source->delta4();
  }
  const auto eig = jacobi_eigen(s.d);
  s.d_eigenvalues = eig.values;
  if (eig.values.front() < kMinCovarianceEigenvalue) {
    throw DegenerateCovariance("weighted covariance is numerically singular (min eigenvalue " +
                               std::to_string(eig.values.front()) + ")");
  }
  s.q = spectral_apply(eig, [](double lambda) { return 1.0 / std::sqrt(lambda); });
  return s;
}

TruncationTvBound truncation_tv_bound(std::span<const TruncatedSummand> summands) {
  TruncationTvBound b{0.0, 0.0, true};
  for (const auto& z : summands) {
    b.excluded_probability += z.excluded_mass;
    b.delta_theta4 += std::pow(z.weight, 4) * z.source->delta4();
  }
  b.holds = b.excluded_probability <= b.delta_theta4 + 1e-12;
  return b;
}

CovarianceBoundCheck check_covariance_bounds(const NormalizationState& state, std::size_t k,
                                             Rng& rng, unsigned directions) {
  CovarianceBoundCheck c;
  c.delta_theta4 = state.delta_theta4;
  c.precondition = state.delta_theta4 <= 1.0 / (8.0 * k);
  c.quadratic_form_bound = 2.0 * k * state.delta_theta4;
  std::vector<double> t(k);
  for (unsigned m = 0; m < directions; ++m) {
    double norm2 = 0.0;
    for (auto& v : t) {
      v = rng.normal();
      norm2 += v * v;
    }
    if (norm2 == 0.0) continue;
    const auto dt = state.d.apply(t);
    double form = 0.0;
    for (std::size_t i = 0; i < k; ++i) form += t[i] * dt[i];
    c.quadratic_form_ratio = std::max(c.quadratic_form_ratio, std::abs(form - norm2) / norm2);
  }
  c.d_minus_identity_norm = symmetric_norm(state.d - Matrix::identity(k));
  c.d_inverse_norm = 1.0 / state.d_eigenvalues.front();
  // Tolerances absorb rounding in D when the bound is attained with equality.
  c.quadratic_form_ok = c.quadratic_form_ratio <= c.quadratic_form_bound + 1e-12;
  c.d_minus_identity_ok = c.d_minus_identity_norm <= 0.25 + 1e-12;
  c.d_inverse_ok = c.d_inverse_norm <= 4.0 / 3.0 + 1e-12;
  return c;
}

}  // namespace wclt
