#include "wgfc/variational.hpp"

#include <cmath>
#include <cstdint>

#include "wgfc/errors.hpp"
#include "wgfc/identities.hpp"

namespace wgfc {

namespace {

// Pointwise Lagrangian values and partials with the derivative expressions
// prepared once.
struct LagrangianEval {
  const LagrangianSpec* spec;
  expr::Expr vp;             // V'
  expr::Expr d2, d3, d4;     // F2', F3', F4'

  explicit LagrangianEval(const LagrangianSpec& s) : spec(&s) {
    if (s.form == LagrangianForm::QuadraticKinetic) {
      if (!(s.mass > 0.0)) throw DomainError("Lagrangian: mass must be positive");
      if (!s.potential.empty()) vp = expr::differentiate(s.potential);
    } else {
      if (s.c2 != 0.0) {
        if (s.f2.empty()) throw DomainError("Lagrangian: F2 required when c2 != 0");
        d2 = expr::differentiate(s.f2);
      }
      if (s.c3 != 0.0) {
        if (s.f3.empty()) throw DomainError("Lagrangian: F3 required when c3 != 0");
        d3 = expr::differentiate(s.f3);
      }
      if (s.c4 != 0.0) {
        if (s.f4.empty()) throw DomainError("Lagrangian: F4 required when c4 != 0");
        d4 = expr::differentiate(s.f4);
      }
    }
  }

  double value(double x, double dl, double dr) const {
    if (spec->form == LagrangianForm::QuadraticKinetic) {
      const double m = spec->mass;
      const double v = spec->potential.empty() ? 0.0 : expr::eval(spec->potential, x);
      return 0.25 * m * dl * dl + 0.25 * m * dr * dr - v;
    }
    double acc = 0.0;
    if (spec->c2 != 0.0) acc += spec->c2 * expr::eval(spec->f2, x);
    if (spec->c3 != 0.0) acc += spec->c3 * expr::eval(spec->f3, dl);
    if (spec->c4 != 0.0) acc += spec->c4 * expr::eval(spec->f4, dr);
    return acc;
  }

  void partials(double x, double dl, double dr, double& p2, double& p3,
                double& p4) const {
    if (spec->form == LagrangianForm::QuadraticKinetic) {
      const double m = spec->mass;
      p2 = vp.empty() ? 0.0 : -expr::eval(vp, x);
      p3 = 0.5 * m * dl;
      p4 = 0.5 * m * dr;
      return;
    }
    p2 = spec->c2 != 0.0 ? spec->c2 * expr::eval(d2, x) : 0.0;
    p3 = spec->c3 != 0.0 ? spec->c3 * expr::eval(d3, dl) : 0.0;
    p4 = spec->c4 != 0.0 ? spec->c4 * expr::eval(d4, dr) : 0.0;
  }
};

struct Context {
  OperatorMatrix dleft, dright;
  std::vector<double> omega;  // trapezoid weights
  std::vector<double> w2;     // w(t_i)^2
};

Context build_context(const VariationalProblem& prob, const SeriesOptions& series,
                      Exec exec) {
  Context c;
  c.dleft = gen_derivative_left(prob.grid, prob.params, prob.w, series, exec).first;
  c.dright = gen_derivative_right(prob.grid, prob.params, prob.w, series, exec).first;
  c.omega = trapezoid_weights(prob.grid);
  c.w2.resize(prob.grid.points());
  for (std::size_t i = 0; i < prob.grid.points(); ++i) {
    const double w = prob.w.value(prob.grid.node(i));
    c.w2[i] = w * w;
  }
  return c;
}

void check_boundary(const VariationalProblem& prob, const SampledFunction& X) {
  if (!(X.grid == prob.grid))
    throw GridMismatchError("variational: trajectory lives on a different grid");
  const double tol_a = 1e-12 * std::max(1.0, std::fabs(prob.X_a));
  const double tol_b = 1e-12 * std::max(1.0, std::fabs(prob.X_b));
  if (std::fabs(X.values.front() - prob.X_a) > tol_a ||
      std::fabs(X.values.back() - prob.X_b) > tol_b)
    throw BoundaryMismatchError("variational: trajectory violates the boundary values");
}

double functional_value(const Context& c,
                        const LagrangianEval& lag, const SampledFunction& X,
                        Exec exec) {
  const auto dl = matvec(c.dleft.entries, X.values, exec);
  const auto dr = matvec(c.dright.entries, X.values, exec);
  double acc = 0.0;
  for (std::size_t i = 0; i < X.values.size(); ++i)
    acc += c.omega[i] * lag.value(X.values[i], dl[i], dr[i]);
  return acc;
}

// Full-length adjoint gradient; callers slice out the interior.
std::vector<double> gradient_full(const Context& c,
                                  const LagrangianEval& lag, const SampledFunction& X,
                                  Exec exec) {
  const std::size_t np = X.values.size();
  const auto dl = matvec(c.dleft.entries, X.values, exec);
  const auto dr = matvec(c.dright.entries, X.values, exec);
  std::vector<double> y2(np), y3(np), y4(np);
  for (std::size_t i = 0; i < np; ++i) {
    double p2, p3, p4;
    lag.partials(X.values[i], dl[i], dr[i], p2, p3, p4);
    y2[i] = c.omega[i] * p2;
    y3[i] = c.omega[i] * p3;
    y4[i] = c.omega[i] * p4;
  }
  std::vector<double> g(np, 0.0);
  const Matrix& a = c.dleft.entries;
  const Matrix& b = c.dright.entries;
  const std::int64_t cols = static_cast<std::int64_t>(np);
#pragma omp parallel for schedule(static) if (use_omp(exec))
  for (std::int64_t kk = 0; kk < cols; ++kk) {
    const std::size_t k = static_cast<std::size_t>(kk);
    double acc = y2[k];
    for (std::size_t i = 0; i < np; ++i) acc += a(i, k) * y3[i] + b(i, k) * y4[i];
    g[k] = acc;
  }
  return g;
}

std::vector<double> interior(const std::vector<double>& full) {
  return std::vector<double>(full.begin() + 1, full.end() - 1);
}

// Returns V'' when the potential makes the stationarity system linear
// (constant second derivative), otherwise nothing.
std::optional<double> quadratic_curvature(const LagrangianSpec& spec) {
  if (spec.form != LagrangianForm::QuadraticKinetic) return std::nullopt;
  if (spec.potential.empty()) return 0.0;
  const expr::Expr vpp = expr::differentiate(expr::differentiate(spec.potential));
  if (!vpp.is_constant()) return std::nullopt;
  return expr::eval(vpp, 0.0);
}

}  // namespace

double evaluate_functional(const VariationalProblem& prob, const SampledFunction& X,
                           const SeriesOptions& series, Exec exec) {
  check_boundary(prob, X);
  const LagrangianEval lag(prob.lagrangian);
  const Context c = build_context(prob, series, exec);
  return functional_value(c, lag, X, exec);
}

std::vector<double> discrete_gradient(const VariationalProblem& prob,
                                      const SampledFunction& X,
                                      const SeriesOptions& series, Exec exec) {
  check_boundary(prob, X);
  const LagrangianEval lag(prob.lagrangian);
  const Context c = build_context(prob, series, exec);
  return interior(gradient_full(c, lag, X, exec));
}

static SampledFunction stationarity_residual(const Context& c, const LagrangianEval& lag,
                                             const SampledFunction& X, Exec exec) {
  const std::size_t np = X.values.size();
  const auto dl = matvec(c.dleft.entries, X.values, exec);
  const auto dr = matvec(c.dright.entries, X.values, exec);
  std::vector<double> p2(np), p3w(np), p4w(np);
  for (std::size_t i = 0; i < np; ++i) {
    double v2, v3, v4;
    lag.partials(X.values[i], dl[i], dr[i], v2, v3, v4);
    p2[i] = v2;
    p3w[i] = v3 / c.w2[i];
    p4w[i] = v4 / c.w2[i];
  }
  const auto t3 = matvec(c.dright.entries, p3w, exec);  // D_b (dL3 / w^2)
  const auto t4 = matvec(c.dleft.entries, p4w, exec);   // D_a (dL4 / w^2)
  SampledFunction r = zeros(X.grid);
  for (std::size_t i = 1; i + 1 < np; ++i)
    r.values[i] = p2[i] - c.w2[i] * t3[i] - c.w2[i] * t4[i];
  return r;
}

SampledFunction el_residual(const VariationalProblem& prob, const SampledFunction& X,
                            const SeriesOptions& series, Exec exec) {
  check_boundary(prob, X);
  const LagrangianEval lag(prob.lagrangian);
  const Context c = build_context(prob, series, exec);
  return stationarity_residual(c, lag, X, exec);
}

double interior_band_max(const SampledFunction& residual, double band) {
  const std::size_t n = residual.grid.n;
  const std::size_t skip =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band * static_cast<double>(n))));
  double best = 0.0;
  for (std::size_t i = skip; i + skip <= n; ++i)
    best = std::max(best, std::fabs(residual.values[i]));
  return best;
}

SampledFunction newton_law_residual(const VariationalProblem& prob,
                                    const SampledFunction& X,
                                    const SeriesOptions& series, Exec exec) {
  if (prob.lagrangian.form != LagrangianForm::QuadraticKinetic)
    throw DomainError("newton_law_residual: requires the quadratic-kinetic Lagrangian");
  check_boundary(prob, X);
  const Context c = build_context(prob, series, exec);
  const double m = prob.lagrangian.mass;
  const std::size_t np = X.values.size();

  const auto dl = matvec(c.dleft.entries, X.values, exec);
  const auto dr = matvec(c.dright.entries, X.values, exec);
  std::vector<double> dl_w2(np), dr_w2(np);
  for (std::size_t i = 0; i < np; ++i) {
    dl_w2[i] = dl[i] / c.w2[i];
    dr_w2[i] = dr[i] / c.w2[i];
  }
  const auto t1 = matvec(c.dright.entries, dl_w2, exec);  // D_b((D_a X)/w^2)
  const auto t2 = matvec(c.dleft.entries, dr_w2, exec);   // D_a((D_b X)/w^2)

  expr::Expr vp;
  if (!prob.lagrangian.potential.empty())
    vp = expr::differentiate(prob.lagrangian.potential);

  SampledFunction r = zeros(X.grid);
  for (std::size_t i = 1; i + 1 < np; ++i) {
    const double lhs = -0.5 * m * (c.w2[i] * t1[i] + c.w2[i] * t2[i]);
    const double vprime = vp.empty() ? 0.0 : expr::eval(vp, X.values[i]);
    r.values[i] = lhs - vprime;
  }
  return r;
}

std::pair<Matrix, std::vector<double>> assemble_quadratic_system(
    const VariationalProblem& prob, const SeriesOptions& series, Exec exec) {
  const auto vpp = quadratic_curvature(prob.lagrangian);
  if (!vpp)
    throw DomainError("assemble_quadratic_system: the stationarity system is not linear");
  const Context c = build_context(prob, series, exec);
  const double m = prob.lagrangian.mass;
  const std::size_t np = prob.grid.points();

  // K = (m/2)(A^T W A + B^T W B) - V'' W, assembled densely.
  Matrix k(np, np);
  const Matrix& a = c.dleft.entries;
  const Matrix& b = c.dright.entries;
  const std::int64_t rows = static_cast<std::int64_t>(np);
#pragma omp parallel for schedule(static) if (use_omp(exec))
  for (std::int64_t rr = 0; rr < rows; ++rr) {
    const std::size_t r = static_cast<std::size_t>(rr);
    double* krow = k.row(r);
    for (std::size_t i = 0; i < np; ++i) {
      const double fa = 0.5 * m * c.omega[i] * a(i, r);
      const double fb = 0.5 * m * c.omega[i] * b(i, r);
      if (fa != 0.0) {
        const double* arow = a.row(i);
        for (std::size_t s = 0; s < np; ++s) krow[s] += fa * arow[s];
      }
      if (fb != 0.0) {
        const double* brow = b.row(i);
        for (std::size_t s = 0; s < np; ++s) krow[s] += fb * brow[s];
      }
    }
    krow[r] -= *vpp * c.omega[r];
  }

  const double vp0 = prob.lagrangian.potential.empty()
                         ? 0.0
                         : expr::eval(expr::differentiate(prob.lagrangian.potential), 0.0);

  Matrix kii(np - 2, np - 2);
  std::vector<double> rhs(np - 2);
  for (std::size_t i = 1; i + 1 < np; ++i) {
    for (std::size_t j = 1; j + 1 < np; ++j) kii(i - 1, j - 1) = k(i, j);
    rhs[i - 1] = vp0 * c.omega[i] - k(i, 0) * prob.X_a - k(i, np - 1) * prob.X_b;
  }
  return {std::move(kii), std::move(rhs)};
}

std::pair<SampledFunction, SolveDiagnostics> solve(const VariationalProblem& prob,
                                                   const SampledFunction& X_init,
                                                   const SolveOptions& opts) {
  check_boundary(prob, X_init);
  if (opts.max_iters < 1) throw DomainError("solve: max_iters must be >= 1");
  if (!(opts.grad_tol > 0.0)) throw DomainError("solve: grad_tol must be positive");

  const LagrangianEval lag(prob.lagrangian);
  const Context c = build_context(prob, opts.series, opts.exec);
  SolveDiagnostics diag;

  if (quadratic_curvature(prob.lagrangian)) {
    auto [kii, rhs] = assemble_quadratic_system(prob, opts.series, opts.exec);
    const auto xi = lu_solve(std::move(kii), std::move(rhs));
    SampledFunction X = X_init;
    for (std::size_t i = 1; i + 1 < X.values.size(); ++i) X.values[i] = xi[i - 1];
    X.values.front() = prob.X_a;
    X.values.back() = prob.X_b;

    diag.used_linear_path = true;
    diag.iterations = 1;
    diag.grad_norm = max_abs(interior(gradient_full(c, lag, X, opts.exec)));
    diag.objective = functional_value(c, lag, X, opts.exec);
    diag.converged = diag.grad_norm <= opts.grad_tol;
    return {std::move(X), diag};
  }

  SampledFunction X = X_init;
  double J = functional_value(c, lag, X, opts.exec);
  double t_init = 1.0;
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    const auto g = interior(gradient_full(c, lag, X, opts.exec));
    diag.grad_norm = max_abs(g);
    diag.iterations = it;
    if (diag.grad_norm <= opts.grad_tol) {
      diag.converged = true;
      break;
    }

    if (opts.step_control == StepControl::FixedStep) {
      for (std::size_t i = 1; i + 1 < X.values.size(); ++i)
        X.values[i] -= opts.fixed_step * g[i - 1];
      J = functional_value(c, lag, X, opts.exec);
      continue;
    }

    double gg = 0.0;
    for (double v : g) gg += v * v;
    double t = t_init;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      SampledFunction trial = X;
      for (std::size_t i = 1; i + 1 < trial.values.size(); ++i)
        trial.values[i] -= t * g[i - 1];
      const double Jt = functional_value(c, lag, trial, opts.exec);
      if (Jt <= J - 1e-4 * t * gg) {
        X = std::move(trial);
        J = Jt;
        t_init = std::min(1.0, 2.0 * t);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      diag.warnings.insert("line-search-stalled");
      break;
    }
  }
  if (!diag.converged && !diag.warnings.count("line-search-stalled"))
    diag.warnings.insert("max-iters-exceeded");
  diag.objective = J;
  return {std::move(X), diag};
}

}  // namespace wgfc
