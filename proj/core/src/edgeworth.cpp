#include "wclt/edgeworth.hpp"

#include <cmath>
#include <string>

#include "wclt/error.hpp"
#include "wclt/special.hpp"

namespace wclt {

namespace {

// All ordered tuples of positive integers of length m summing to r.
void positive_compositions(unsigned r, unsigned m, std::vector<unsigned>& current,
                           std::vector<std::vector<unsigned>>& out) {
  if (current.size() + 1 == m) {
    current.push_back(r);
    out.push_back(current);
    current.pop_back();
    return;
  }
  const unsigned slots_left = m - static_cast<unsigned>(current.size()) - 1;
  for (unsigned v = 1; v + slots_left <= r; ++v) {
    current.push_back(v);
    positive_compositions(r - v, m, current, out);
    current.pop_back();
  }
}

}  // namespace

EdgeworthPolynomial::EdgeworthPolynomial(unsigned r, std::size_t dimension,
                                         std::map<MultiIndex, double> coefficients)
    : r_(r), dimension_(dimension), coefficients_(std::move(coefficients)) {
  for (const auto& [nu, c] : coefficients_) {
    if (nu.dimension() != dimension_) throw DimensionMismatch("Edgeworth monomial of wrong dimension");
    const unsigned order = nu.order();
    if (r_ == 0 ? order != 0 : (order < r_ + 2 || order > 3 * r_)) {
      throw Error("monomial (" + nu.to_string() + ") outside the degree range of P_" +
                  std::to_string(r_));
    }
  }
}

double EdgeworthPolynomial::coefficient(const MultiIndex& nu) const {
  const auto it = coefficients_.find(nu);
  return it == coefficients_.end() ? 0.0 : it->second;
}

EdgeworthPolynomial build_P(unsigned r, const CumulantTable& weighted) {
  const std::size_t k = weighted.dimension();
  if (r == 0) return EdgeworthPolynomial(0, k, {{MultiIndex::zero(k), 1.0}});
  if (weighted.max_order() < r + 2) {
    throw InsufficientOrder("P_" + std::to_string(r) + " needs cumulants through order " +
                            std::to_string(r + 2) + ", table has " +
                            std::to_string(weighted.max_order()));
  }

  // κ_ν/ν! grouped by order, computed once.
  std::vector<std::vector<std::pair<MultiIndex, double>>> scaled(r + 3);
  for (unsigned order = 3; order <= r + 2; ++order) {
    for (auto& nu : enumerate_order(k, order)) {
      const double v = weighted[nu] / static_cast<double>(nu.factorial());
      scaled[order].emplace_back(std::move(nu), v);
    }
  }

  std::map<MultiIndex, double> coefficients;
  double inv_m_factorial = 1.0;
  for (unsigned m = 1; m <= r; ++m) {
    inv_m_factorial /= m;
    std::vector<std::vector<unsigned>> parts;
    std::vector<unsigned> current;
    positive_compositions(r, m, current, parts);
    for (const auto& composition : parts) {
      // Odometer over the m-fold product of index lists.
      std::vector<std::size_t> pick(m, 0);
      while (true) {
        MultiIndex key = MultiIndex::zero(k);
        double c = inv_m_factorial;
        for (unsigned j = 0; j < m; ++j) {
          const auto& [nu, v] = scaled[composition[j] + 2][pick[j]];
          key = key + nu;
          c *= v;
        }
        coefficients[key] += c;
        unsigned j = m;
        while (j-- > 0) {
          if (++pick[j] < scaled[composition[j] + 2].size()) break;
          pick[j] = 0;
        }
        if (j == static_cast<unsigned>(-1)) break;
      }
    }
  }
  return EdgeworthPolynomial(r, k, std::move(coefficients));
}

std::complex<double> eval_P(const EdgeworthPolynomial& p, std::span<const std::complex<double>> z) {
  if (z.size() != p.dimension()) {
    throw DimensionMismatch("eval_P: argument has dimension " + std::to_string(z.size()) +
                            ", polynomial has " + std::to_string(p.dimension()));
  }
  std::complex<double> total = 0.0;
  for (const auto& [nu, c] : p.coefficients()) total += c * power(z, nu);
  return total;
}

EdgeworthApproximant::EdgeworthApproximant(const CumulantTable& weighted, unsigned r_max)
    : EdgeworthApproximant(weighted, r_max, {}) {}

EdgeworthApproximant::EdgeworthApproximant(const CumulantTable& weighted, unsigned r_max,
                                           std::vector<double> q)
    : dimension_(weighted.dimension()),
      mode_(q.empty() ? CovarianceMode::identity : CovarianceMode::general),
      q_(std::move(q)) {
  if (r_max > kMaxEdgeworthOrder) {
    throw InsufficientOrder("Edgeworth order r_max = " + std::to_string(r_max) +
                            " exceeds the supported maximum " +
                            std::to_string(kMaxEdgeworthOrder));
  }
  if (!q_.empty() && q_.size() != dimension_ * dimension_) {
    throw DimensionMismatch("normalizer Q must be k×k");
  }
  for (unsigned r = 0; r <= r_max; ++r) polynomials_.push_back(build_P(r, weighted));
}

std::complex<double> approximant_cf(const EdgeworthApproximant& a, std::span<const double> t) {
  const std::size_t k = a.dimension();
  if (t.size() != k) throw DimensionMismatch("approximant_cf: argument dimension mismatch");
  std::vector<std::complex<double>> z(k);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    norm2 += t[i] * t[i];
    double qt = t[i];
    if (a.mode() == CovarianceMode::general) {
      qt = 0.0;
      for (std::size_t j = 0; j < k; ++j) qt += a.normalizer()[i * k + j] * t[j];
    }
    z[i] = {0.0, qt};
  }
  std::complex<double> sum = 0.0;
  for (const auto& p : a.polynomials()) sum += eval_P(p, z);
  return std::exp(-0.5 * norm2) * sum;
}

double corrected_cdf_1d(const EdgeworthApproximant& a, double x) {
  if (a.dimension() != 1) throw DimensionMismatch("corrected_cdf_1d requires k = 1");
  const double q = a.mode() == CovarianceMode::general ? a.normalizer().front() : 1.0;
  // (it)^m e^{−t²/2} is the transform of He_m(x)φ(x), whose antiderivative
  // from −∞ is −He_{m−1}(x)φ(x).
  double correction = 0.0;
  for (const auto& p : a.polynomials()) {
    if (p.order_index() == 0) continue;
    for (const auto& [nu, c] : p.coefficients()) {
      const unsigned m = nu[0];
      correction += c * std::pow(q, m) * hermite_he(m - 1, x);
    }
  }
  return normal_cdf(x) - normal_pdf(x) * correction;
}

}  // namespace wclt
