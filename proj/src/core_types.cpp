#include "wgfc/core_types.hpp"

#include <cmath>
#include <sstream>

#include "wgfc/errors.hpp"

namespace wgfc {

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::ConstantOne:
      return "constant-one";
    case Normalization::OneMinusAlphaPlusAlphaOverGamma:
      return "one-minus-alpha-plus-alpha-over-gamma";
  }
  return "?";
}

static double normalization_value(double alpha, Normalization n) {
  switch (n) {
    case Normalization::ConstantOne:
      return 1.0;
    case Normalization::OneMinusAlphaPlusAlphaOverGamma:
      // alpha/Gamma(alpha) -> 0 as alpha -> 0+.
      return alpha == 0.0 ? 1.0 : 1.0 - alpha + alpha / std::tgamma(alpha);
  }
  return 1.0;
}

FracParams make_params(double alpha, double beta, Normalization normalization) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw DomainError("make_params: alpha must lie in [0,1)");
  if (!(beta > 0.0)) throw DomainError("make_params: beta must be positive");

  FracParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.normalization = normalization;
  p.b_value = normalization_value(alpha, normalization);
  p.phi = (1.0 - alpha) / p.b_value;
  p.psi = alpha / p.b_value;
  p.mu = alpha / (1.0 - alpha);
  return p;
}

Grid make_grid(double a, double b, std::size_t n) {
  if (!(a < b)) throw DomainError("make_grid: requires a < b");
  if (n < 2) throw DomainError("make_grid: requires n >= 2");
  return Grid{a, b, n};
}

SampledFunction sample(const std::function<double(double)>& f, const Grid& grid) {
  SampledFunction s;
  s.grid = grid;
  s.values.resize(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double x = grid.node(i);
    double v;
    try {
      v = f(x);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "sample: evaluation failed at x = " << x << ": " << e.what();
      throw EvalError(os.str());
    }
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "sample: non-finite value at x = " << x;
      throw EvalError(os.str());
    }
    s.values[i] = v;
  }
  return s;
}

SampledFunction zeros(const Grid& grid) {
  return SampledFunction{grid, std::vector<double>(grid.points(), 0.0)};
}

SampledFunction combine(double ca, const SampledFunction& a,
                        double cb, const SampledFunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatchError("combine: different grids");
  SampledFunction r = zeros(a.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i)
    r.values[i] = ca * a.values[i] + cb * b.values[i];
  return r;
}

SampledFunction scaled(const SampledFunction& f, double c) {
  SampledFunction r = f;
  for (double& v : r.values) v *= c;
  return r;
}

double sup_norm(const SampledFunction& f) {
  double best = 0.0;
  for (double v : f.values) best = std::max(best, std::fabs(v));
  return best;
}

double sup_diff(const SampledFunction& a, const SampledFunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatchError("sup_diff: different grids");
  double best = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    best = std::max(best, std::fabs(a.values[i] - b.values[i]));
  return best;
}

std::vector<std::string> WeightFunction::validate_on(const Grid& grid) const {
  std::vector<std::string> warnings;
  bool nonpositive_slope = false;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const double x = grid.node(i);
    const double w = value(x);
    if (!(w > 0.0) || !std::isfinite(w)) {
      std::ostringstream os;
      os << "weight '" << description << "' is not positive at x = " << x;
      throw DomainError(os.str());
    }
    if (derivative && derivative(x) <= 0.0) nonpositive_slope = true;
  }
  if (nonpositive_slope)
    warnings.push_back("weight '" + description +
                       "' has w' <= 0 at some node (w' > 0 is assumed by the "
                       "operator definitions; results remain well defined)");
  return warnings;
}

WeightFunction unit_weight() {
  return WeightFunction{[](double) { return 1.0; }, [](double) { return 0.0; }, "1"};
}

WeightFunction reflect_weight(const WeightFunction& w, double a, double b) {
  WeightFunction r;
  const double s = a + b;
  auto value = w.value;
  auto deriv = w.derivative;
  r.value = [value, s](double x) { return value(s - x); };
  r.derivative = [deriv, s](double x) { return deriv ? -deriv(s - x) : 0.0; };
  r.description = w.description + " reflected";
  return r;
}

}  // namespace wgfc
