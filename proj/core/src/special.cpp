#include "wclt/special.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "wclt/error.hpp"

namespace wclt {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chi_square_cdf(unsigned k, double x) {
  if (k == 0) throw Error("chi_square_cdf: degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * k, 0.5 * x);
}

double hermite_he(unsigned m, double x) {
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = x;
  for (unsigned j = 1; j < m; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace wclt
