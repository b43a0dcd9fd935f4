#include "wgfc/identities.hpp"

#include <cmath>
#include <tuple>

#include "wgfc/errors.hpp"

namespace wgfc {

std::string to_string(IdentityId id) {
  switch (id) {
    case IdentityId::SamkoLemma: return "SamkoLemma";
    case IdentityId::InversionLeft: return "InversionLeft";
    case IdentityId::InversionRight: return "InversionRight";
    case IdentityId::IbpUnweightedIntegral: return "IbpUnweightedIntegral";
    case IdentityId::IbpUnweightedDerivative: return "IbpUnweightedDerivative";
    case IdentityId::IbpWeightedIntegral: return "IbpWeightedIntegral";
    case IdentityId::IbpWeightedDerivative: return "IbpWeightedDerivative";
    case IdentityId::IbpCorollaryRight: return "IbpCorollaryRight";
    case IdentityId::IbpSymmetricIntegral: return "IbpSymmetricIntegral";
    case IdentityId::IbpSymmetricDerivative: return "IbpSymmetricDerivative";
    case IdentityId::AbReduction: return "AbReduction";
  }
  return "?";
}

const std::vector<NamedFn>& corpus() {
  static const std::vector<NamedFn> fns = {
      {[](double) { return 1.0; }, "1"},
      {[](double x) { return x; }, "x"},
      {[](double x) { return x * x; }, "x^2"},
      {[](double x) { return std::sin(x); }, "sin(x)"},
      {[](double x) { return std::cos(x); }, "cos(x)"},
      {[](double x) { return std::exp(x); }, "exp(x)"},
      {[](double x) { return 1.0 / (1.0 + x * x); }, "1/(1+x^2)"},
  };
  return fns;
}

std::vector<double> trapezoid_weights(const Grid& grid) {
  std::vector<double> w(grid.points(), grid.h());
  w.front() = 0.5 * grid.h();
  w.back() = 0.5 * grid.h();
  return w;
}

double inner(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid)) throw GridMismatchError("inner: different grids");
  const double h = f.grid.h();
  double acc = 0.5 * (f.values.front() * g.values.front() +
                      f.values.back() * g.values.back());
  for (std::size_t i = 1; i + 1 < f.values.size(); ++i)
    acc += f.values[i] * g.values[i];
  return acc * h;
}

namespace {

double rel_of(double lhs, double rhs, double abs_gap) {
  return abs_gap / std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
}

// Runs `core` (which returns lhs, rhs, abs_gap at a given n) at the requested
// grid and over the refinement ladder, assembling the report.
template <typename Core>
IdentityReport run_check(IdentityId id, const Grid& grid, const VerifyOptions& opts,
                         ParamsEcho echo, Core&& core) {
  IdentityReport rep;
  rep.identity_id = id;
  rep.grid_n = grid.n;
  rep.params_echo = std::move(echo);
  std::tie(rep.lhs, rep.rhs, rep.abs_gap) = core(grid.n);
  rep.rel_gap = rel_of(rep.lhs, rep.rhs, rep.abs_gap);
  for (std::size_t n : opts.ladder) {
    if (n == grid.n) {
      rep.convergence_rows.emplace_back(n, rep.abs_gap);
      continue;
    }
    const auto [l, r, gap] = core(n);
    (void)l;
    (void)r;
    rep.convergence_rows.emplace_back(n, gap);
  }
  return rep;
}

SampledFunction sample_named(const NamedFn& f, const Grid& g) { return sample(f.fn, g); }

}  // namespace

IdentityReport verify_samko(double beta, const NamedFn& f, const NamedFn& g,
                            const Grid& grid, const VerifyOptions& opts) {
  if (!(beta > 0.0)) throw DomainError("verify_samko: beta must be positive");
  ParamsEcho echo;
  echo.beta = beta;
  echo.f = f.name;
  echo.g = g.name;
  const WeightFunction one = unit_weight();
  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto fs = sample_named(f, gr);
    const auto gs = sample_named(g, gr);
    const auto il = rl_integral_left(gr, beta, one, opts.exec);
    const auto ir = rl_integral_right(gr, beta, one, opts.exec);
    const double lhs = inner(fs, apply(il, gs, opts.exec));
    const double rhs = inner(gs, apply(ir, fs, opts.exec));
    return std::tuple{lhs, rhs, std::fabs(lhs - rhs)};
  };
  return run_check(IdentityId::SamkoLemma, grid, opts, echo, core);
}

IdentityReport verify_inversion(const FracParams& p, const WeightFunction& w,
                                const NamedFn& f, const Grid& grid, Side side,
                                const VerifyOptions& opts) {
  ParamsEcho echo;
  echo.alpha = p.alpha;
  echo.beta = p.beta;
  echo.normalization = to_string(p.normalization);
  echo.weight = w.description;
  echo.f = f.name;
  echo.variant = side == Side::Left ? "left" : "right";

  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto fs = sample_named(f, gr);
    const auto integral = side == Side::Left ? gen_integral_left(gr, p, w, opts.exec)
                                             : gen_integral_right(gr, p, w, opts.exec);
    const auto deriv = side == Side::Left
                           ? gen_derivative_left(gr, p, w, opts.series, opts.exec).first
                           : gen_derivative_right(gr, p, w, opts.series, opts.exec).first;
    const auto target = side == Side::Left ? fs : scaled(fs, -1.0);
    const auto c1 = apply(integral, apply(deriv, fs, opts.exec), opts.exec);
    const auto c2 = apply(deriv, apply(integral, fs, opts.exec), opts.exec);

    double gap = -1.0, lhs = 0.0, rhs = 0.0;
    for (const auto* comp : {&c1, &c2}) {
      for (std::size_t i = 0; i < comp->values.size(); ++i) {
        const double d = std::fabs(comp->values[i] - target.values[i]);
        if (d > gap) {
          gap = d;
          lhs = comp->values[i];
          rhs = target.values[i];
        }
      }
    }
    return std::tuple{lhs, rhs, gap};
  };
  return run_check(side == Side::Left ? IdentityId::InversionLeft
                                      : IdentityId::InversionRight,
                   grid, opts, echo, core);
}

namespace {

// Shared machinery for the four integration-by-parts checks. `build` returns
// the (lhs integrand pair, rhs integrand pair) given the operator matrices.
struct IbpSides {
  SampledFunction lhs_a, lhs_b;  // lhs = inner(lhs_a, Op_l * lhs_b)
  SampledFunction rhs_a, rhs_b;  // rhs = sign * inner(rhs_a, Op_r * rhs_b)
};

std::pair<OperatorMatrix, OperatorMatrix> build_pair(const Grid& gr, const FracParams& p,
                                                     const WeightFunction& w,
                                                     OpVariant variant,
                                                     const VerifyOptions& opts) {
  if (variant == OpVariant::Integral)
    return {gen_integral_left(gr, p, w, opts.exec), gen_integral_right(gr, p, w, opts.exec)};
  return {gen_derivative_left(gr, p, w, opts.series, opts.exec).first,
          gen_derivative_right(gr, p, w, opts.series, opts.exec).first};
}

// The derivative-form identities pair D_a with -D_b under this library's sign
// convention (see the header comment).
double ibp_sign(OpVariant variant) { return variant == OpVariant::Integral ? 1.0 : -1.0; }

}  // namespace

IdentityReport verify_ibp_unweighted(const FracParams& p, const NamedFn& f,
                                     const NamedFn& g, const Grid& grid,
                                     OpVariant variant, const VerifyOptions& opts) {
  ParamsEcho echo;
  echo.alpha = p.alpha;
  echo.beta = p.beta;
  echo.normalization = to_string(p.normalization);
  echo.f = f.name;
  echo.g = g.name;
  echo.variant = variant == OpVariant::Integral ? "integral" : "derivative";

  const WeightFunction one = unit_weight();
  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto fs = sample_named(f, gr);
    const auto gs = sample_named(g, gr);
    const auto [op_l, op_r] = build_pair(gr, p, one, variant, opts);
    const double lhs = inner(fs, apply(op_l, gs, opts.exec));
    const double rhs = ibp_sign(variant) * inner(gs, apply(op_r, fs, opts.exec));
    return std::tuple{lhs, rhs, std::fabs(lhs - rhs)};
  };
  return run_check(variant == OpVariant::Integral ? IdentityId::IbpUnweightedIntegral
                                                  : IdentityId::IbpUnweightedDerivative,
                   grid, opts, echo, core);
}

IdentityReport verify_ibp_weighted(const FracParams& p, const WeightFunction& w,
                                   const NamedFn& f, const NamedFn& g, const Grid& grid,
                                   OpVariant variant, const VerifyOptions& opts) {
  ParamsEcho echo;
  echo.alpha = p.alpha;
  echo.beta = p.beta;
  echo.normalization = to_string(p.normalization);
  echo.weight = w.description;
  echo.f = f.name;
  echo.g = g.name;
  echo.variant = variant == OpVariant::Integral ? "integral" : "derivative";

  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto fs = sample_named(f, gr);
    const auto gs = sample_named(g, gr);
    const auto w2g = sample([&](double x) { return w.value(x) * w.value(x) * g.fn(x); }, gr);
    const auto f_w2 = sample([&](double x) { return f.fn(x) / (w.value(x) * w.value(x)); }, gr);
    const auto [op_l, op_r] = build_pair(gr, p, w, variant, opts);
    const double lhs = inner(fs, apply(op_l, gs, opts.exec));
    const double rhs = ibp_sign(variant) * inner(w2g, apply(op_r, f_w2, opts.exec));
    return std::tuple{lhs, rhs, std::fabs(lhs - rhs)};
  };
  return run_check(variant == OpVariant::Integral ? IdentityId::IbpWeightedIntegral
                                                  : IdentityId::IbpWeightedDerivative,
                   grid, opts, echo, core);
}

IdentityReport verify_ibp_corollary_right(const FracParams& p, const WeightFunction& w,
                                          const NamedFn& f, const NamedFn& g,
                                          const Grid& grid, OpVariant variant,
                                          const VerifyOptions& opts) {
  ParamsEcho echo;
  echo.alpha = p.alpha;
  echo.beta = p.beta;
  echo.normalization = to_string(p.normalization);
  echo.weight = w.description;
  echo.f = f.name;
  echo.g = g.name;
  echo.variant = variant == OpVariant::Integral ? "integral" : "derivative";

  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto fs = sample_named(f, gr);
    const auto gs = sample_named(g, gr);
    const auto w2g = sample([&](double x) { return w.value(x) * w.value(x) * g.fn(x); }, gr);
    const auto f_w2 = sample([&](double x) { return f.fn(x) / (w.value(x) * w.value(x)); }, gr);
    const auto [op_l, op_r] = build_pair(gr, p, w, variant, opts);
    // Mirror image of the weighted identity: the right operator acts on the
    // lhs, the left one on f/w^2.
    const double lhs = inner(fs, apply(op_r, gs, opts.exec));
    const double rhs = ibp_sign(variant) * inner(w2g, apply(op_l, f_w2, opts.exec));
    return std::tuple{lhs, rhs, std::fabs(lhs - rhs)};
  };
  return run_check(IdentityId::IbpCorollaryRight, grid, opts, echo, core);
}

IdentityReport verify_ibp_symmetric(const FracParams& p, const WeightFunction& w,
                                    const NamedFn& f, const NamedFn& g, const Grid& grid,
                                    OpVariant variant, const VerifyOptions& opts) {
  ParamsEcho echo;
  echo.alpha = p.alpha;
  echo.beta = p.beta;
  echo.normalization = to_string(p.normalization);
  echo.weight = w.description;
  echo.f = f.name;
  echo.g = g.name;
  echo.variant = variant == OpVariant::Integral ? "integral" : "derivative";

  auto core = [&](std::size_t n) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const auto wf = sample([&](double x) { return w.value(x) * f.fn(x); }, gr);
    const auto wg = sample([&](double x) { return w.value(x) * g.fn(x); }, gr);
    const auto f_w = sample([&](double x) { return f.fn(x) / w.value(x); }, gr);
    const auto g_w = sample([&](double x) { return g.fn(x) / w.value(x); }, gr);
    const auto [op_l, op_r] = build_pair(gr, p, w, variant, opts);
    const double lhs = inner(wf, apply(op_l, g_w, opts.exec));
    const double rhs = ibp_sign(variant) * inner(wg, apply(op_r, f_w, opts.exec));
    return std::tuple{lhs, rhs, std::fabs(lhs - rhs)};
  };
  return run_check(variant == OpVariant::Integral ? IdentityId::IbpSymmetricIntegral
                                                  : IdentityId::IbpSymmetricDerivative,
                   grid, opts, echo, core);
}

// ----------------------------------------------------------- AB reduction

// Self-contained product-trapezoidal RL integral with unit weight, written as
// a cell-accumulation loop (the general builder fills entries by closed form).
static Matrix ab_rl_integral(const Grid& grid, double order, Side side) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  const double inv_g = order < 170.0 ? 1.0 / std::tgamma(order) : std::exp(-std::lgamma(order));
  Matrix m(n + 1, n + 1);

  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t cells = side == Side::Left ? i : n - i;
    double* row = m.row(i);
    for (std::size_t c = 1; c <= cells; ++c) {
      const double lo = static_cast<double>(c - 1) * h;
      const double hi = static_cast<double>(c) * h;
      const double p1 = (std::pow(hi, order) - std::pow(lo, order)) / order;
      const double p2 = (std::pow(hi, order + 1.0) - std::pow(lo, order + 1.0)) / (order + 1.0);
      const double far = (p2 - lo * p1) / h;   // node at distance c
      const double near = (hi * p1 - p2) / h;  // node at distance c-1
      if (side == Side::Left) {
        row[i - c] += inv_g * far;
        row[i - c + 1] += inv_g * near;
      } else {
        row[i + c] += inv_g * far;
        row[i + c - 1] += inv_g * near;
      }
    }
  }
  return m;
}

static double ab_normalization(double alpha) {
  return alpha == 0.0 ? 1.0 : 1.0 - alpha + alpha / std::tgamma(alpha);
}

Matrix ab_derivative_matrix(const Grid& grid, double alpha, Side side,
                            double series_tol, std::size_t max_terms) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw DomainError("ab_derivative_matrix: alpha must lie in [0,1)");
  const double b = ab_normalization(alpha);
  const double phi = (1.0 - alpha) / b;
  const double mu = alpha / (1.0 - alpha);

  Matrix sum = Matrix::identity(grid.points());
  if (mu != 0.0) {
    double coef = 1.0;
    for (std::size_t j = 1; j < max_terms; ++j) {
      coef *= -mu;
      Matrix term = ab_rl_integral(grid, alpha * static_cast<double>(j), side);
      axpy(sum, coef, term);
      if (std::fabs(coef) * max_row_sum(term) < series_tol) break;
    }
  }
  const double scale = (side == Side::Left ? 1.0 : -1.0) / phi;
  if (scale != 1.0)
    for (auto& v : sum.data()) v *= scale;
  return sum;
}

Matrix ab_integral_matrix(const Grid& grid, double alpha, Side side) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw DomainError("ab_integral_matrix: alpha must lie in [0,1)");
  const double b = ab_normalization(alpha);
  const double phi = (1.0 - alpha) / b;
  const double psi = alpha / b;

  Matrix m = Matrix::identity(grid.points());
  for (auto& v : m.data()) v *= phi;
  if (psi != 0.0) {
    Matrix rl = ab_rl_integral(grid, alpha, side);
    axpy(m, psi, rl);
  }
  return m;
}

IdentityReport verify_ab_reduction(double alpha, const NamedFn& f, const NamedFn& g,
                                   const Grid& grid, const VerifyOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("verify_ab_reduction: alpha must lie in (0,1)");

  ParamsEcho echo;
  echo.alpha = alpha;
  echo.beta = alpha;
  echo.normalization = to_string(Normalization::OneMinusAlphaPlusAlphaOverGamma);
  echo.f = f.name;
  echo.g = g.name;

  const FracParams p =
      make_params(alpha, alpha, Normalization::OneMinusAlphaPlusAlphaOverGamma);
  const WeightFunction one = unit_weight();

  auto matrix_gap = [&](std::size_t n, double* lhs_at, double* rhs_at) {
    const Grid gr = make_grid(grid.a, grid.b, n);
    const Matrix pairs[4][2] = {
        {gen_derivative_left(gr, p, one, opts.series, opts.exec).first.entries,
         ab_derivative_matrix(gr, alpha, Side::Left, opts.series.series_tol,
                              opts.series.max_terms)},
        {gen_derivative_right(gr, p, one, opts.series, opts.exec).first.entries,
         ab_derivative_matrix(gr, alpha, Side::Right, opts.series.series_tol,
                              opts.series.max_terms)},
        {gen_integral_left(gr, p, one, opts.exec).entries,
         ab_integral_matrix(gr, alpha, Side::Left)},
        {gen_integral_right(gr, p, one, opts.exec).entries,
         ab_integral_matrix(gr, alpha, Side::Right)},
    };
    double gap = -1.0;
    for (const auto& pr : pairs) {
      for (std::size_t idx = 0; idx < pr[0].data().size(); ++idx) {
        const double d = std::fabs(pr[0].data()[idx] - pr[1].data()[idx]);
        if (d > gap) {
          gap = d;
          if (lhs_at) *lhs_at = pr[0].data()[idx];
          if (rhs_at) *rhs_at = pr[1].data()[idx];
        }
      }
    }
    return gap;
  };

  auto core = [&](std::size_t n) {
    double lhs = 0.0, rhs = 0.0;
    const double gap = matrix_gap(n, &lhs, &rhs);
    return std::tuple{lhs, rhs, gap};
  };
  IdentityReport rep = run_check(IdentityId::AbReduction, grid, opts, echo, core);

  // Integration by parts in AB form, at the requested grid. The derivative
  // identity pairs the left AB derivative with minus the right one, matching
  // the general convention.
  const auto fs = sample_named(f, grid);
  const auto gs = sample_named(g, grid);
  const Matrix di_l = ab_integral_matrix(grid, alpha, Side::Left);
  const Matrix di_r = ab_integral_matrix(grid, alpha, Side::Right);
  const Matrix dd_l = ab_derivative_matrix(grid, alpha, Side::Left);
  const Matrix dd_r = ab_derivative_matrix(grid, alpha, Side::Right);
  const SampledFunction ilg{grid, matvec(di_l, gs.values, opts.exec)};
  const SampledFunction irf{grid, matvec(di_r, fs.values, opts.exec)};
  const SampledFunction dlg{grid, matvec(dd_l, gs.values, opts.exec)};
  const SampledFunction drf{grid, matvec(dd_r, fs.values, opts.exec)};
  rep.notes.emplace_back("ibp_integral_gap", std::fabs(inner(fs, ilg) - inner(gs, irf)));
  rep.notes.emplace_back("ibp_derivative_gap", std::fabs(inner(fs, dlg) + inner(gs, drf)));
  return rep;
}

}  // namespace wgfc
