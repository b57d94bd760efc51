#pragma once

namespace wclt {

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);
/// P(χ²_k ≤ x): the regularized lower incomplete gamma P(k/2, x/2).
double chi_square_cdf(unsigned k, double x);
/// Probabilists' Hermite polynomial He_m(x).
double hermite_he(unsigned m, double x);

}  // namespace wclt
