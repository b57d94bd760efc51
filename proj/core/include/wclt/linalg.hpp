#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wclt {

/// Dense row-major square matrix for the tiny k×k problems of this library.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  Matrix(std::size_t n, std::vector<double> row_major);

  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

  Matrix operator*(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  std::vector<double> apply(std::span<const double> v) const;

  bool is_symmetric(double tolerance) const;
  /// max_ij |a_ij|.
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< columns are eigenvectors
  unsigned sweeps = 0;
};

/// Cyclic Jacobi rotations until every off-diagonal entry is below
/// `threshold` (relative to the Frobenius norm).
SymmetricEigen jacobi_eigen(const Matrix& a, double threshold = 1e-12, unsigned max_sweeps = 100);

/// V·diag(f(λ))·Vᵀ.
Matrix spectral_apply(const SymmetricEigen& eig, double (*f)(double));

/// Spectral norm of a symmetric matrix (max |λ|).
double symmetric_norm(const Matrix& a);

}  // namespace wclt
