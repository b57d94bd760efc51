#include "wclt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wclt/error.hpp"

namespace wclt {

Matrix::Matrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw DimensionMismatch("matrix data is not n×n");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (other.n_ != n_) throw DimensionMismatch("matrix product of mismatched sizes");
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t l = 0; l < n_; ++l) {
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += (*this)(i, l) * other(l, j);
    }
  }
  return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
  if (other.n_ != n_) throw DimensionMismatch("matrix difference of mismatched sizes");
  Matrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= other.data_[i];
  return out;
}

std::vector<double> Matrix::apply(std::span<const double> v) const {
  if (v.size() != n_) throw DimensionMismatch("matrix-vector product of mismatched sizes");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * v[j];
  }
  return out;
}

bool Matrix::is_symmetric(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tolerance) return false;
    }
  }
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricEigen jacobi_eigen(const Matrix& input, double threshold, unsigned max_sweeps) {
  const std::size_t n = input.size();
  Matrix a = input;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) a(p, q) = a(q, p) = 0.5 * (input(p, q) + input(q, p));
  }
  Matrix v = Matrix::identity(n);
  double scale = 0.0;
  for (double x : input.data()) scale += x * x;
  scale = std::sqrt(scale);
  const double limit = threshold * std::max(scale, 1e-300);

  unsigned sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    }
    if (off <= limit) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= limit * 1e-3) continue;
        // Rotation angle that annihilates a(p,q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (sweep == max_sweeps) throw NumericalError("Jacobi eigendecomposition did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{{}, Matrix(n), sweep};
  for (std::size_t c = 0; c < n; ++c) {
    out.values.push_back(a(order[c], order[c]));
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

Matrix spectral_apply(const SymmetricEigen& eig, double (*f)(double)) {
  const std::size_t n = eig.values.size();
  Matrix out(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double fl = f(eig.values[l]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out(i, j) += eig.vectors(i, l) * fl * eig.vectors(j, l);
    }
  }
  return out;
}

double symmetric_norm(const Matrix& a) {
  const auto eig = jacobi_eigen(a);
  double m = 0.0;
  for (double v : eig.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace wclt
