#include "surfmax/special_functions.hpp"

#include <cmath>
#include <limits>

#include "surfmax/error.hpp"

namespace surfmax::special {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// log(x^s e^-x / Gamma(s)), the common prefactor of both expansions.
double log_prefactor(double s, double x) { return s * std::log(x) - x - std::lgamma(s); }

// P(s, x) by the series sum_k x^k / (s (s+1) ... (s+k)).
double lower_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double ap = s;
  for (int k = 0; k < kMaxIterations; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(s, x));
}

// Q(s, x) by the Legendre continued fraction, modified Lentz.
double upper_fraction(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(s, x)) * h;
}

void check_args(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw Error(ErrorKind::Domain, "incomplete gamma requires s > 0 and x >= 0");
  }
}

}  // namespace

double gamma_p(double s, double x) {
  check_args(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return lower_series(s, x);
  return 1.0 - upper_fraction(s, x);
}

double gamma_q(double s, double x) {
  check_args(s, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return 1.0 - lower_series(s, x);
  return upper_fraction(s, x);
}

}  // namespace surfmax::special
