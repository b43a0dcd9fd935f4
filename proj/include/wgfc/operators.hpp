// Dense-matrix realizations of the fractional operators on a uniform grid.
//
// Sign convention. The left derivative is built from its series
//   D_a = (1/phi) * sum_j (-mu)^j I_a^{beta j},
// the right derivative carries the series' leading minus sign,
//   D_b = (-1/phi) * sum_j (-mu)^j I_b^{beta j},
// so at alpha = 0 the pair degenerates to (+Id, -Id) and the inversion
// identities read  I_a D_a = D_a I_a = Id  and  I_b D_b = D_b I_b = -Id.
// Consequently D_b equals -1 times the reflection conjugate of D_a, and the
// integration-by-parts identities pair D_a with -D_b (see identities.hpp).
#ifndef WGFC_OPERATORS_HPP
#define WGFC_OPERATORS_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "wgfc/core_types.hpp"
#include "wgfc/exec.hpp"
#include "wgfc/linalg.hpp"

namespace wgfc {

enum class OperatorKind {
  RLIntLeft,
  RLIntRight,
  GenIntLeft,
  GenIntRight,
  GenDerLeft,
  GenDerRight,
  Reflection,
  Identity,
};

std::string to_string(OperatorKind k);

enum class Side { Left, Right };

// Row i holds the quadrature rule producing (Op f)(t_i) from samples of f.
struct OperatorMatrix {
  Grid grid;
  Matrix entries;
  OperatorKind kind = OperatorKind::Identity;
  std::optional<FracParams> params;  // generalized operators
  std::optional<double> rl_order;    // plain Riemann-Liouville integrals
  std::string weight_description = "1";
};

// Truncation diagnostics for the derivative series.
struct SeriesReport {
  std::size_t terms_used = 1;
  double last_term_norm = 0.0;
  std::set<std::string> warning_flags;  // "non-convergence", "large-mu", ...
};

struct SeriesOptions {
  double series_tol = 1e-14;   // stop once |(-mu)^j| * ||I^{beta j}|| drops below
  std::size_t max_terms = 200; // flag "non-convergence" past this budget
};

// Weighted Riemann-Liouville integral of order beta > 0 by product-trapezoidal
// quadrature: on each cell w*f is replaced by its linear interpolant and the
// kernel moments are integrated in closed form, so affine w*f is reproduced
// exactly. Row 0 (left) / row n (right) is zero, the integral over an empty
// interval.
OperatorMatrix rl_integral_left(const Grid& grid, double beta, const WeightFunction& w,
                                Exec exec = Exec::parallel);
OperatorMatrix rl_integral_right(const Grid& grid, double beta, const WeightFunction& w,
                                 Exec exec = Exec::parallel);

// phi*Id + psi*I^beta.
OperatorMatrix gen_integral_left(const Grid& grid, const FracParams& p,
                                 const WeightFunction& w, Exec exec = Exec::parallel);
OperatorMatrix gen_integral_right(const Grid& grid, const FracParams& p,
                                  const WeightFunction& w, Exec exec = Exec::parallel);

// Truncated derivative series (see the header comment for the signs).
std::pair<OperatorMatrix, SeriesReport> gen_derivative_left(
    const Grid& grid, const FracParams& p, const WeightFunction& w,
    const SeriesOptions& opts = {}, Exec exec = Exec::parallel);
std::pair<OperatorMatrix, SeriesReport> gen_derivative_right(
    const Grid& grid, const FracParams& p, const WeightFunction& w,
    const SeriesOptions& opts = {}, Exec exec = Exec::parallel);

OperatorMatrix identity_operator(const Grid& grid);
OperatorMatrix reflection_operator(const Grid& grid);  // anti-diagonal permutation

// (Q f)(x) = f(a + b - x): reverses the sample vector.
SampledFunction reflect(const SampledFunction& f);

// Matrix-vector product with a grid check.
SampledFunction apply(const OperatorMatrix& m, const SampledFunction& f,
                      Exec exec = Exec::parallel);

// Slow reference path for cross-checks: evaluates the kernel integral
//   F(x) = integral of (w f)(s) E_beta[-mu |x-s|^beta] ds
// by plain trapezoidal quadrature and differentiates F by centered differences
// (one-sided at the endpoints), then scales by 1/(phi w). Discretizes the same
// operators as the series matrices through an entirely different route.
SampledFunction gen_derivative_direct(const SampledFunction& f, const FracParams& p,
                                      const WeightFunction& w, Side side,
                                      Exec exec = Exec::parallel);

}  // namespace wgfc

#endif
