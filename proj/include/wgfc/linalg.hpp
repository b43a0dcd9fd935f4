// Dense row-major matrices and the few kernels the operator algebra needs.
#ifndef WGFC_LINALG_HPP
#define WGFC_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "wgfc/exec.hpp"

namespace wgfc {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// y = M x. Parallel over output rows; each row is a fixed-order dot product.
std::vector<double> matvec(const Matrix& m, std::span<const double> x,
                           Exec exec = Exec::parallel);

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec = Exec::parallel);

Matrix transpose(const Matrix& m);

// C = a + s*B (entrywise), parallel over rows.
void axpy(Matrix& a, double s, const Matrix& b, Exec exec = Exec::parallel);

double max_row_sum(const Matrix& m);              // induced sup-norm
double max_abs(const Matrix& m);                  // largest |entry|
double max_abs_diff(const Matrix& a, const Matrix& b);

double max_abs(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// Solves A x = b by LU with partial pivoting. Throws SingularSystemError.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

}  // namespace wgfc

#endif
