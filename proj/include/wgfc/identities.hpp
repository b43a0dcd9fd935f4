// Numerical verification harness for the operator identities: the transpose
// lemma for plain RL integrals, the inversion formulas, the four
// integration-by-parts identities and the Atangana-Baleanu specialization.
//
// Each check evaluates both sides of the continuum identity on a grid and over
// a refinement ladder; the identities are exact in the continuum, so the gaps
// measure pure discretization error and must shrink under refinement.
//
// Derivative-form identities: with this library's sign convention (right
// derivative = series with leading -1/phi) the adjoint of the left derivative
// is MINUS the right one, so the derivative rows below pair D_a with -D_b:
//   <f, D_a g>        = -<g, D_b f>                      (unweighted)
//   <f, D_a^w g>      = -<w^2 g, D_b^w(f/w^2)>           (weighted)
//   <f, D_b^w g>      = -<w^2 g, D_a^w(f/w^2)>           (right corollary)
//   <w f, D_a^w(g/w)> = -<w g, D_b^w(f/w)>               (symmetric form)
// The integral-form identities need no sign.
#ifndef WGFC_IDENTITIES_HPP
#define WGFC_IDENTITIES_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wgfc/core_types.hpp"
#include "wgfc/operators.hpp"

namespace wgfc {

enum class IdentityId {
  SamkoLemma,
  InversionLeft,
  InversionRight,
  IbpUnweightedIntegral,
  IbpUnweightedDerivative,
  IbpWeightedIntegral,
  IbpWeightedDerivative,
  IbpCorollaryRight,
  IbpSymmetricIntegral,
  IbpSymmetricDerivative,
  AbReduction,
};

std::string to_string(IdentityId id);

enum class OpVariant { Integral, Derivative };

struct ParamsEcho {
  double alpha = 0.0;
  double beta = 1.0;
  std::string normalization = "constant-one";
  std::string weight = "1";
  std::string f = "";
  std::string g = "";
  std::string variant = "";
};

struct IdentityReport {
  IdentityId identity_id = IdentityId::SamkoLemma;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_gap = 0.0;  // |lhs - rhs|
  double rel_gap = 0.0;  // abs_gap / max(|lhs|, |rhs|, 1e-300)
  std::size_t grid_n = 0;
  ParamsEcho params_echo;
  std::vector<std::pair<std::size_t, double>> convergence_rows;  // (n, abs_gap)
  std::vector<std::pair<std::string, double>> notes;  // identity-specific extras
};

struct VerifyOptions {
  std::vector<std::size_t> ladder = {64, 128, 256, 512};
  SeriesOptions series;
  Exec exec = Exec::parallel;
};

using RealFn = std::function<double(double)>;

struct NamedFn {
  RealFn fn;
  std::string name;
};

// The smooth, sign-varying test corpus on [0,1]:
// {1, x, x^2, sin x, cos x, e^x, 1/(1+x^2)}.
const std::vector<NamedFn>& corpus();

// Trapezoidal quadrature of the pointwise product.
double inner(const SampledFunction& f, const SampledFunction& g);
std::vector<double> trapezoid_weights(const Grid& grid);

// <f, I_a^beta g> vs <g, I_b^beta f> with unit weight.
IdentityReport verify_samko(double beta, const NamedFn& f, const NamedFn& g,
                            const Grid& grid, const VerifyOptions& opts = {});

// Both composition orders of (integral, derivative) against the target
// (+f on the left, -f on the right); abs_gap is the worse sup-norm deviation.
IdentityReport verify_inversion(const FracParams& p, const WeightFunction& w,
                                const NamedFn& f, const Grid& grid, Side side,
                                const VerifyOptions& opts = {});

IdentityReport verify_ibp_unweighted(const FracParams& p, const NamedFn& f,
                                     const NamedFn& g, const Grid& grid,
                                     OpVariant variant, const VerifyOptions& opts = {});

IdentityReport verify_ibp_weighted(const FracParams& p, const WeightFunction& w,
                                   const NamedFn& f, const NamedFn& g, const Grid& grid,
                                   OpVariant variant, const VerifyOptions& opts = {});

IdentityReport verify_ibp_corollary_right(const FracParams& p, const WeightFunction& w,
                                          const NamedFn& f, const NamedFn& g,
                                          const Grid& grid, OpVariant variant,
                                          const VerifyOptions& opts = {});

IdentityReport verify_ibp_symmetric(const FracParams& p, const WeightFunction& w,
                                    const NamedFn& f, const NamedFn& g, const Grid& grid,
                                    OpVariant variant, const VerifyOptions& opts = {});

// Specializes the generalized operators to w == 1, beta == alpha and the
// normalization B = 1 - alpha + alpha/Gamma(alpha), and compares them
// entrywise against the self-contained Atangana-Baleanu builders below.
// abs_gap is the worst matrix gap over the four operator pairs; the
// integration-by-parts gaps in AB form are attached as notes.
IdentityReport verify_ab_reduction(double alpha, const NamedFn& f, const NamedFn& g,
                                   const Grid& grid, const VerifyOptions& opts = {});

// Self-contained AB operator builders (unit weight), written independently of
// operators.cpp so the comparison above cross-checks two implementations.
Matrix ab_derivative_matrix(const Grid& grid, double alpha, Side side,
                            double series_tol = 1e-14, std::size_t max_terms = 200);
Matrix ab_integral_matrix(const Grid& grid, double alpha, Side side);

}  // namespace wgfc

#endif
