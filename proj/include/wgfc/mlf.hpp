// Mittag-Leffler function E_beta(z) = sum_j z^j / Gamma(beta*j + 1) for real
// arguments. This is the kernel of every nonsingular-kernel operator in the
// library, so it is evaluated conservatively: terms are formed in extended
// precision through log-gamma, and the sum is compensated.
#ifndef WGFC_MLF_HPP
#define WGFC_MLF_HPP

#include <cstddef>

namespace wgfc {

struct MLEvalOptions {
  double abs_tol = 1e-15;       // stop once |term| drops below this
  std::size_t max_terms = 400;  // throw NonConvergenceError past this budget
};

// Optional per-call diagnostics. `cancellation_warning` is raised when the
// largest intermediate term exceeds 1e8 * |result|: the alternating series has
// then destroyed ~8 digits and callers should not trust fine tolerances.
struct MLDiagnostics {
  std::size_t terms_used = 0;
  double max_term = 0.0;
  bool cancellation_warning = false;
};

// E_beta(z). Requires beta > 0 and finite z.
double mittag_leffler(double beta, double z, const MLEvalOptions& opts = {},
                      MLDiagnostics* diag = nullptr);

// Kernel value E_beta(-mu * d^beta) for a nonnegative displacement d.
double ml_kernel(double beta, double mu, double d, const MLEvalOptions& opts = {},
                 MLDiagnostics* diag = nullptr);

}  // namespace wgfc

#endif
