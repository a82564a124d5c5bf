#pragma once

#include <array>
#include <span>
#include <vector>

namespace surfmax {

/// Losses are clamped to this value before taking logarithms.
inline constexpr double kLossFloor = 1e-12;

struct LossSample {
  double alpha = 0.0;
  double beta = 0.0;
  double loss = 0.0;
};

/// l(alpha, beta) = exp(-(a alpha^2 + b beta^2 + c alpha beta + d alpha + e beta + f)).
struct QuadExpSurface {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;

  std::array<double, 6> coefficients() const { return {a, b, c, d, e, f}; }

  /// Value of the quadratic exponent a alpha^2 + ... + f.
  double exponent(double alpha, double beta) const;
};

enum class ExtremumKind { Maximum, Minimum, Saddle };

const char* to_string(ExtremumKind kind);

struct ExtremumResult {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  ExtremumKind kind = ExtremumKind::Maximum;
  double predicted_loss = 0.0;
  bool in_simplex = false;
};

/// Extremum-emphasising weights
///   w_i = (exp((l_i - max)/sigma) + exp((l_i - min)/sigma)) / (sqrt(2 pi) sigma)
/// with sigma the population standard deviation. Constant inputs
/// (sigma < 1e-12) get uniform weights of 1.
std::vector<double> compute_weights(std::span<const double> losses);

/// Weighted least-squares fit of -ln(l) against the bivariate quadratic
/// basis (alpha^2, beta^2, alpha beta, alpha, beta, 1).
///
/// Solved by column-pivoted QR of the weighted design matrix. Throws
/// InsufficientData (< 6 samples or size mismatch), InvalidSample (nonfinite
/// loss, nonpositive weight) or DegenerateFit (rank < 6).
QuadExpSurface fit_quad_exp(std::span<const LossSample> samples, std::span<const double> weights);

/// Stationary point of the exponent: [2a c; c 2b] x = [-d; -e].
/// Throws DegenerateSurface when |4ab - c^2| <= 1e-12.
ExtremumResult solve_extremum(const QuadExpSurface& surface);

double predict_loss(const QuadExpSurface& surface, double alpha, double beta);

/// False when the extremum lies farther than 1 + slack outside the unit
/// box measured by max(|alpha|, |beta|, |alpha + beta|).
bool within_extrapolation_bounds(const ExtremumResult& r, double slack);

}  // namespace surfmax
