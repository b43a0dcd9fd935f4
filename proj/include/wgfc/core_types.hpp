// Fractional parameters, uniform grids, sampled functions and weights.
#ifndef WGFC_CORE_TYPES_HPP
#define WGFC_CORE_TYPES_HPP

#include <functional>
#include <string>
#include <vector>

namespace wgfc {

// Normalization function B(alpha) with B(0) = B(1) = 1.
enum class Normalization {
  ConstantOne,                       // B == 1
  OneMinusAlphaPlusAlphaOverGamma,   // B = 1 - alpha + alpha/Gamma(alpha)
};

std::string to_string(Normalization n);

// Orders alpha in [0,1), beta > 0 and the derived constants
//   phi = (1-alpha)/B(alpha), psi = alpha/B(alpha), mu = alpha/(1-alpha).
struct FracParams {
  double alpha = 0.0;
  double beta = 1.0;
  Normalization normalization = Normalization::ConstantOne;
  double b_value = 1.0;
  double phi = 1.0;
  double psi = 0.0;
  double mu = 0.0;
};

FracParams make_params(double alpha, double beta,
                       Normalization normalization = Normalization::ConstantOne);

// Uniform grid over [a,b] with n cells and n+1 nodes.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 2;

  double h() const { return (b - a) / static_cast<double>(n); }
  std::size_t points() const { return n + 1; }
  // Node n is pinned to b so both endpoints are exact.
  double node(std::size_t i) const {
    return i == n ? b : a + static_cast<double>(i) * h();
  }
  bool operator==(const Grid& o) const { return a == o.a && b == o.b && n == o.n; }
};

Grid make_grid(double a, double b, std::size_t n);

struct SampledFunction {
  Grid grid;
  std::vector<double> values;  // one per node, all finite
};

// Samples f at every node; wraps evaluation failures in EvalError carrying the
// node coordinate.
SampledFunction sample(const std::function<double(double)>& f, const Grid& grid);

SampledFunction zeros(const Grid& grid);

// Pointwise helpers used throughout the harness.
SampledFunction combine(double ca, const SampledFunction& a,
                        double cb, const SampledFunction& b);
SampledFunction scaled(const SampledFunction& f, double c);
double sup_norm(const SampledFunction& f);
double sup_diff(const SampledFunction& a, const SampledFunction& b);

// Positive weight w with pointwise derivative access. The definition in use
// asks for w, w' > 0, but w == 1 (w' == 0) is the most important special case,
// so only positivity is enforced; a non-increasing weight merely warns.
struct WeightFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description = "1";

  // Throws DomainError if w <= 0 at a node; returns human-readable warnings
  // (currently only "w' <= 0 somewhere").
  std::vector<std::string> validate_on(const Grid& grid) const;
};

WeightFunction unit_weight();

// w(a + b - x): the reflected weight, needed by the left/right duality.
WeightFunction reflect_weight(const WeightFunction& w, double a, double b);

}  // namespace wgfc

#endif
