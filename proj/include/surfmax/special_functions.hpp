#pragma once

namespace surfmax::special {

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
///
/// Uses the power series for x < s + 1 and a modified-Lentz continued
/// fraction for Q otherwise. Requires s > 0 and x >= 0; relative accuracy is
/// about 1e-14 for s up to a few thousand.
double gamma_p(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double gamma_q(double s, double x);

}  // namespace surfmax::special
