#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flr::linalg {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenResult {
  std::vector<double> values;  ///< unsorted, in solver order
  Matrix vectors;              ///< column j pairs with values[j]
  int sweeps = 0;
};

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm is below tol * ||A||_F.
  double tolerance = 1e-14;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Throws NonConvergence.
EigenResult jacobi_eigen(Matrix a, const JacobiOptions& opts = {});

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// NumericalSingularity when a pivot is below pivot_tol * max|A|.
std::vector<double> solve(Matrix a, std::vector<double> b, double pivot_tol = 1e-14);

}  // namespace flr::linalg
