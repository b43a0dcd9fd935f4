#include "wgfc/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "wgfc/errors.hpp"

namespace wgfc {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x, Exec exec) {
  if (x.size() != m.cols()) throw GridMismatchError("matvec: size mismatch");
  std::vector<double> y(m.rows(), 0.0);
  const std::int64_t rows = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static) if (use_omp(exec))
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* r = m.row(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += r[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec) {
  if (a.cols() != b.rows()) throw GridMismatchError("matmul: size mismatch");
  Matrix c(a.rows(), b.cols());
  const std::int64_t rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (use_omp(exec))
  for (std::int64_t i = 0; i < rows; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    double* ci = c.row(ii);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(ii, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

void axpy(Matrix& a, double s, const Matrix& b, Exec exec) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  auto da = a.data();
  auto db = b.data();
  const std::int64_t len = static_cast<std::int64_t>(da.size());
#pragma omp parallel for schedule(static) if (use_omp(exec))
  for (std::int64_t i = 0; i < len; ++i) da[i] += s * db[i];
}

double max_row_sum(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::fabs(r[j]);
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::fabs(v));
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double best = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i)
    best = std::max(best, std::fabs(da[i] - db[i]));
  return best;
}

double max_abs(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::fabs(x));
  return best;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw GridMismatchError("lu_solve: size mismatch");

  double scale = max_abs(a);
  if (scale == 0.0) throw SingularSystemError("lu_solve: zero matrix");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(perm[k], k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(perm[i], k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-14 * scale)
      throw SingularSystemError("lu_solve: matrix is singular to working precision");
    std::swap(perm[k], perm[piv]);

    const std::size_t pk = perm[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const std::size_t pi = perm[i];
      const double f = a(pi, k) / a(pk, k);
      a(pi, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(pi, j) -= f * a(pk, j);
    }
  }

  // Forward then back substitution on the permuted system.
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) acc -= a(perm[i], j) * y[j];
    y[i] = acc;
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= a(perm[ii], j) * x[j];
    x[ii] = acc / a(perm[ii], ii);
  }
  return x;
}

}  // namespace wgfc
