#include "wgfc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wgfc/errors.hpp"
#include "wgfc/mlf.hpp"

namespace wgfc {

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::RLIntLeft: return "RLIntLeft";
    case OperatorKind::RLIntRight: return "RLIntRight";
    case OperatorKind::GenIntLeft: return "GenIntLeft";
    case OperatorKind::GenIntRight: return "GenIntRight";
    case OperatorKind::GenDerLeft: return "GenDerLeft";
    case OperatorKind::GenDerRight: return "GenDerRight";
    case OperatorKind::Reflection: return "Reflection";
    case OperatorKind::Identity: return "Identity";
  }
  return "?";
}

static double inv_gamma(double g) {
  // 1/Gamma underflows gracefully to zero for huge orders.
  return g < 170.0 ? 1.0 / std::tgamma(g) : std::exp(-std::lgamma(g));
}

namespace {

// Product-trapezoidal coefficients for the kernel (distance)^{gamma-1} on a
// uniform grid. Cell m spans distances [(m-1)h, mh] from the evaluation node;
// left[m] weighs the sample at distance m, right[m] the one at distance m-1:
//   left[m]  = (1/h) * int tau^{gamma-1} (tau - (m-1)h) dtau
//   right[m] = (1/h) * int (mh - tau) tau^{gamma-1} dtau
// For gamma = 1 both reduce to h/2, the plain trapezoidal rule.
struct CellCoefficients {
  std::vector<double> left, right;  // index 1..n
};

CellCoefficients product_trapezoid_coefficients(double gamma, double h, std::size_t n) {
  CellCoefficients c;
  c.left.resize(n + 1, 0.0);
  c.right.resize(n + 1, 0.0);
  std::vector<double> pg(n + 1), pg1(n + 1);  // (mh)^gamma, (mh)^{gamma+1}
  for (std::size_t m = 0; m <= n; ++m) {
    const double tau = static_cast<double>(m) * h;
    pg[m] = std::pow(tau, gamma);
    pg1[m] = std::pow(tau, gamma + 1.0);
  }
  for (std::size_t m = 1; m <= n; ++m) {
    const double p1 = (pg[m] - pg[m - 1]) / gamma;            // int tau^{g-1}
    const double p2 = (pg1[m] - pg1[m - 1]) / (gamma + 1.0);  // int tau^{g}
    const double tau_lo = static_cast<double>(m - 1) * h;
    const double tau_hi = static_cast<double>(m) * h;
    c.left[m] = (p2 - tau_lo * p1) / h;
    c.right[m] = (tau_hi * p1 - p2) / h;
  }
  return c;
}

// Fills the lower (left) or upper (right) triangle of the weighted RL integral
// matrix of order gamma. The two fills are exact mirror images, so conjugating
// the left matrix of the reflected weight by the reflection permutation
// reproduces the right matrix bit for bit.
Matrix rl_matrix(const Grid& grid, double gamma, const WeightFunction& w, Side side,
                 Exec exec) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  const CellCoefficients c = product_trapezoid_coefficients(gamma, h, n);
  const double ig = inv_gamma(gamma);

  std::vector<double> wv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) wv[i] = w.value(grid.node(i));

  Matrix m(n + 1, n + 1);
  const std::int64_t rows = static_cast<std::int64_t>(n) + 1;
#pragma omp parallel for schedule(dynamic, 16) if (use_omp(exec))
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double* row = m.row(i);
    const double scale = ig / wv[i];
    if (side == Side::Left) {
      if (i == 0) continue;  // empty integration interval
      for (std::size_t k = 0; k <= i; ++k) {
        double coef;
        if (k == 0)
          coef = c.left[i];
        else if (k == i)
          coef = c.right[1];
        else
          coef = c.left[i - k] + c.right[i - k + 1];
        row[k] = scale * coef * wv[k];
      }
    } else {
      if (i == n) continue;
      for (std::size_t k = i; k <= n; ++k) {
        double coef;
        if (k == n)
          coef = c.left[n - i];
        else if (k == i)
          coef = c.right[1];
        else
          coef = c.left[k - i] + c.right[k - i + 1];
        row[k] = scale * coef * wv[k];
      }
    }
  }
  return m;
}

void validate_weight(const WeightFunction& w, const Grid& grid, SeriesReport* report) {
  const auto warnings = w.validate_on(grid);  // throws on non-positive weight
  if (report)
    for (const auto& msg : warnings) {
      (void)msg;
      report->warning_flags.insert("nonincreasing-weight");
    }
}

}  // namespace

OperatorMatrix rl_integral_left(const Grid& grid, double beta, const WeightFunction& w,
                                Exec exec) {
  if (!(beta > 0.0)) throw DomainError("rl_integral_left: beta must be positive");
  validate_weight(w, grid, nullptr);
  return OperatorMatrix{grid, rl_matrix(grid, beta, w, Side::Left, exec),
                        OperatorKind::RLIntLeft, std::nullopt, beta, w.description};
}

OperatorMatrix rl_integral_right(const Grid& grid, double beta, const WeightFunction& w,
                                 Exec exec) {
  if (!(beta > 0.0)) throw DomainError("rl_integral_right: beta must be positive");
  validate_weight(w, grid, nullptr);
  return OperatorMatrix{grid, rl_matrix(grid, beta, w, Side::Right, exec),
                        OperatorKind::RLIntRight, std::nullopt, beta, w.description};
}

static Matrix gen_integral_matrix(const Grid& grid, const FracParams& p,
                                  const WeightFunction& w, Side side, Exec exec) {
  Matrix m = Matrix::identity(grid.points());
  if (p.psi != 0.0) {
    Matrix rl = rl_matrix(grid, p.beta, w, side, exec);
    for (std::size_t i = 0; i < grid.points(); ++i) {
      double* row = m.row(i);
      const double* r = rl.row(i);
      for (std::size_t k = 0; k < grid.points(); ++k)
        row[k] = p.phi * row[k] + p.psi * r[k];
    }
  } else if (p.phi != 1.0) {
    for (auto& v : m.data()) v *= p.phi;
  }
  return m;
}

OperatorMatrix gen_integral_left(const Grid& grid, const FracParams& p,
                                 const WeightFunction& w, Exec exec) {
  validate_weight(w, grid, nullptr);
  return OperatorMatrix{grid, gen_integral_matrix(grid, p, w, Side::Left, exec),
                        OperatorKind::GenIntLeft, p, std::nullopt, w.description};
}

OperatorMatrix gen_integral_right(const Grid& grid, const FracParams& p,
                                  const WeightFunction& w, Exec exec) {
  validate_weight(w, grid, nullptr);
  return OperatorMatrix{grid, gen_integral_matrix(grid, p, w, Side::Right, exec),
                        OperatorKind::GenIntRight, p, std::nullopt, w.description};
}

static std::pair<OperatorMatrix, SeriesReport> gen_derivative(
    const Grid& grid, const FracParams& p, const WeightFunction& w, Side side,
    const SeriesOptions& opts, Exec exec) {
  if (!(opts.series_tol > 0.0))
    throw DomainError("gen_derivative: series_tol must be positive");
  if (opts.max_terms < 1) throw DomainError("gen_derivative: max_terms must be >= 1");

  SeriesReport report;
  validate_weight(w, grid, &report);
  if (p.mu * std::pow(grid.b - grid.a, p.beta) > 30.0)
    report.warning_flags.insert("large-mu");

  // Terms (-mu)^j I^{beta j}, j = 0 giving the identity; the 1/phi scaling and
  // the side sign are applied once at the end so alpha = 0 stays exact.
  Matrix sum = Matrix::identity(grid.points());
  if (p.mu != 0.0) {
    // ||I^gamma|| <= (b-a)^gamma / Gamma(gamma+1) * max(w)/min(w); used in log
    // form to stop without assembling terms that cannot reach series_tol
    // (their kernel powers may overflow for wide intervals).
    double w_min = w.value(grid.node(0)), w_max = w_min;
    for (std::size_t i = 1; i <= grid.n; ++i) {
      const double v = w.value(grid.node(i));
      w_min = std::min(w_min, v);
      w_max = std::max(w_max, v);
    }
    const double log_len = std::log(grid.b - grid.a);
    const double log_wratio = std::log(w_max / w_min);

    double coef = 1.0;
    double max_term_norm = 1.0;  // the j = 0 identity term
    bool converged = false;
    for (std::size_t j = 1; j < opts.max_terms; ++j) {
      coef *= -p.mu;
      const double gamma = p.beta * static_cast<double>(j);
      const double log_bound = std::log(std::fabs(coef)) + gamma * log_len -
                               std::lgamma(gamma + 1.0) + log_wratio;
      if (log_bound < std::log(opts.series_tol)) {
        report.last_term_norm = std::exp(log_bound);
        converged = true;
        break;
      }
      const Matrix term = rl_matrix(grid, gamma, w, side, exec);
      for (double v : term.data())
        if (!std::isfinite(v))
          throw DomainError("gen_derivative: series term exceeds double range "
                            "(interval too wide for these orders)");
      axpy(sum, coef, term, exec);
      ++report.terms_used;
      report.last_term_norm = std::fabs(coef) * max_row_sum(term);
      max_term_norm = std::max(max_term_norm, report.last_term_norm);
      if (report.last_term_norm < opts.series_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) report.warning_flags.insert("non-convergence");
    // As with the scalar kernel: once the largest intermediate term dwarfs
    // the assembled operator, the alternating sum has destroyed most digits.
    if (max_term_norm > 1e8 * max_row_sum(sum))
      report.warning_flags.insert("cancellation");
  }

  const double scale = (side == Side::Left ? 1.0 : -1.0) / p.phi;
  if (scale != 1.0)
    for (auto& v : sum.data()) v *= scale;

  const OperatorKind kind =
      side == Side::Left ? OperatorKind::GenDerLeft : OperatorKind::GenDerRight;
  return {OperatorMatrix{grid, std::move(sum), kind, p, std::nullopt, w.description},
          report};
}

std::pair<OperatorMatrix, SeriesReport> gen_derivative_left(
    const Grid& grid, const FracParams& p, const WeightFunction& w,
    const SeriesOptions& opts, Exec exec) {
  return gen_derivative(grid, p, w, Side::Left, opts, exec);
}

std::pair<OperatorMatrix, SeriesReport> gen_derivative_right(
    const Grid& grid, const FracParams& p, const WeightFunction& w,
    const SeriesOptions& opts, Exec exec) {
  return gen_derivative(grid, p, w, Side::Right, opts, exec);
}

OperatorMatrix identity_operator(const Grid& grid) {
  return OperatorMatrix{grid, Matrix::identity(grid.points()), OperatorKind::Identity,
                        std::nullopt, std::nullopt, "1"};
}

OperatorMatrix reflection_operator(const Grid& grid) {
  Matrix m(grid.points(), grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) m(i, grid.points() - 1 - i) = 1.0;
  return OperatorMatrix{grid, std::move(m), OperatorKind::Reflection, std::nullopt,
                        std::nullopt, "1"};
}

SampledFunction reflect(const SampledFunction& f) {
  SampledFunction r = f;
  std::reverse(r.values.begin(), r.values.end());
  return r;
}

SampledFunction apply(const OperatorMatrix& m, const SampledFunction& f, Exec exec) {
  if (!(m.grid == f.grid)) throw GridMismatchError("apply: operator and sample grids differ");
  return SampledFunction{f.grid, matvec(m.entries, f.values, exec)};
}

SampledFunction gen_derivative_direct(const SampledFunction& f, const FracParams& p,
                                      const WeightFunction& w, Side side, Exec exec) {
  const Grid& grid = f.grid;
  const std::size_t n = grid.n;
  const double h = grid.h();
  w.validate_on(grid);

  std::vector<double> wf(n + 1), wv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    wv[i] = w.value(grid.node(i));
    wf[i] = wv[i] * f.values[i];
  }

  // Kernel values depend only on the node distance.
  std::vector<double> kern(n + 1);
  for (std::size_t m = 0; m <= n; ++m)
    kern[m] = ml_kernel(p.beta, p.mu, static_cast<double>(m) * h);

  // F_i = trapezoidal integral of (w f)(s) E[-mu |t_i - s|^beta] over the
  // interval between t_i and the near endpoint.
  std::vector<double> F(n + 1, 0.0);
  const std::int64_t rows = static_cast<std::int64_t>(n) + 1;
#pragma omp parallel for schedule(dynamic, 16) if (use_omp(exec))
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double acc = 0.0;
    if (side == Side::Left) {
      if (i == 0) continue;
      acc = 0.5 * (wf[0] * kern[i] + wf[i] * kern[0]);
      for (std::size_t k = 1; k < i; ++k) acc += wf[k] * kern[i - k];
    } else {
      if (i == n) continue;
      acc = 0.5 * (wf[i] * kern[0] + wf[n] * kern[n - i]);
      for (std::size_t k = i + 1; k < n; ++k) acc += wf[k] * kern[k - i];
    }
    F[i] = acc * h;
  }

  // dF/dx by centered differences, one-sided at the endpoints. Both sides are
  // scaled by +1/(phi w): for the right operator the series' leading minus
  // sign and the shrinking integration interval cancel, so that alpha = 0
  // degenerates to +f (left) and -f (right), matching the matrices.
  SampledFunction out = zeros(grid);
  for (std::size_t i = 0; i <= n; ++i) {
    double dF;
    if (i == 0)
      dF = (F[1] - F[0]) / h;
    else if (i == n)
      dF = (F[n] - F[n - 1]) / h;
    else
      dF = (F[i + 1] - F[i - 1]) / (2.0 * h);
    out.values[i] = dF / (p.phi * wv[i]);
  }
  return out;
}

}  // namespace wgfc
