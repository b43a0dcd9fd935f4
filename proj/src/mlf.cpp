#include "wgfc/mlf.hpp"

#include <cmath>
#include <limits>

#include "wgfc/errors.hpp"

namespace wgfc {

double mittag_leffler(double beta, double z, const MLEvalOptions& opts,
                      MLDiagnostics* diag) {
  if (!(beta > 0.0)) throw DomainError("mittag_leffler: beta must be positive");
  if (!std::isfinite(z)) throw DomainError("mittag_leffler: z must be finite");
  if (opts.abs_tol <= 0.0) throw DomainError("mittag_leffler: abs_tol must be positive");
  if (opts.max_terms < 1) throw DomainError("mittag_leffler: max_terms must be >= 1");

  // Kahan-compensated sum in long double. Terms go through expl/lgammal so a
  // single term never overflows and carries ~18 correct digits, which keeps the
  // absolute error of badly cancelling sums (z << 0) near 1e-13 * max|term|.
  long double sum = 1.0L;  // j = 0 term: 1/Gamma(1) = 1
  long double comp = 0.0L;
  long double max_term = 1.0L;
  std::size_t terms = 1;
  bool converged = (z == 0.0);

  if (!converged) {
    const long double log_abs_z = std::log(std::fabs(static_cast<long double>(z)));
    const bool negative = z < 0.0;
    for (std::size_t j = 1; j < opts.max_terms; ++j) {
      const long double log_mag =
          static_cast<long double>(j) * log_abs_z -
          std::lgamma(static_cast<long double>(beta) * static_cast<long double>(j) + 1.0L);
      long double term = std::exp(log_mag);
      if (negative && (j % 2 == 1)) term = -term;

      const long double y = term - comp;
      const long double t = sum + y;
      comp = (t - sum) - y;
      sum = t;

      ++terms;
      max_term = std::max(max_term, std::fabs(term));
      if (std::fabs(term) < static_cast<long double>(opts.abs_tol)) {
        converged = true;
        break;
      }
    }
  }

  if (!converged)
    throw NonConvergenceError("mittag_leffler: series did not reach abs_tol within max_terms");

  const double result = static_cast<double>(sum);
  if (diag) {
    diag->terms_used = terms;
    diag->max_term = static_cast<double>(max_term);
    diag->cancellation_warning =
        static_cast<double>(max_term) > 1e8 * std::max(std::fabs(result),
                                                       std::numeric_limits<double>::min());
  }
  return result;
}

double ml_kernel(double beta, double mu, double d, const MLEvalOptions& opts,
                 MLDiagnostics* diag) {
  if (d < 0.0) throw DomainError("ml_kernel: displacement must be nonnegative");
  if (mu < 0.0) throw DomainError("ml_kernel: mu must be nonnegative");
  const double z = (d == 0.0) ? 0.0 : -mu * std::pow(d, beta);
  return mittag_leffler(beta, z, opts, diag);
}

}  // namespace wgfc
