#include <doctest.h>

#include <cmath>
#include <random>

#include "wgfc/errors.hpp"
#include "wgfc/linalg.hpp"

using namespace wgfc;

namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("serial and parallel kernels agree bitwise") {
  std::mt19937 rng(42);
  const Matrix a = random_matrix(rng, 57, 91);
  const Matrix b = random_matrix(rng, 91, 33);
  std::vector<double> x(91);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x) v = u(rng);

  const auto y_ser = matvec(a, x, Exec::serial);
  const auto y_par = matvec(a, x, Exec::parallel);
  CHECK(y_ser == y_par);

  const Matrix c_ser = matmul(a, b, Exec::serial);
  const Matrix c_par = matmul(a, b, Exec::parallel);
  CHECK(max_abs_diff(c_ser, c_par) == 0.0);

  Matrix s1 = a, s2 = a;
  axpy(s1, 0.37, a, Exec::serial);
  axpy(s2, 0.37, a, Exec::parallel);
  CHECK(max_abs_diff(s1, s2) == 0.0);
}

TEST_CASE("identity and transpose") {
  const Matrix id = Matrix::identity(5);
  std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(matvec(id, x) == x);

  std::mt19937 rng(7);
  const Matrix a = random_matrix(rng, 6, 4);
  const Matrix at = transpose(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) CHECK(a(i, j) == at(j, i));
}

TEST_CASE("norms") {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = -2.0;
  m(1, 0) = 0.5;
  m(1, 1) = 0.25;
  CHECK(max_row_sum(m) == 3.0);
  CHECK(max_abs(m) == 2.0);
}

TEST_CASE("lu solve") {
  std::mt19937 rng(2024);
  const std::size_t n = 40;
  Matrix a = random_matrix(rng, n, n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 5.0;  // well-conditioned
  std::vector<double> x_true(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x_true) v = u(rng);
  const auto b = matvec(a, x_true);
  const auto x = lu_solve(a, b);
  CHECK(max_abs_diff(x, x_true) <= 1e-11);

  Matrix sing(3, 3);
  sing(0, 0) = 1.0;
  sing(1, 0) = 2.0;  // rank 1
  sing(2, 0) = 3.0;
  CHECK_THROWS_AS(lu_solve(sing, {1.0, 2.0, 3.0}), SingularSystemError);
}

TEST_SUITE_END();
