#include "surfmax/surface_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "surfmax/error.hpp"

namespace surfmax {

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr double kSingularHessian = 1e-12;
// Relative pivot threshold below which the weighted design is rank deficient.
constexpr double kRankThreshold = 1e-12;

}  // namespace

double QuadExpSurface::exponent(double alpha, double beta) const {
  return a * alpha * alpha + b * beta * beta + c * alpha * beta + d * alpha + e * beta + f;
}

const char* to_string(ExtremumKind kind) {
  switch (kind) {
    case ExtremumKind::Maximum: return "maximum";
    case ExtremumKind::Minimum: return "minimum";
    case ExtremumKind::Saddle: return "saddle";
  }
  return "unknown";
}

std::vector<double> compute_weights(std::span<const double> losses) {
  if (losses.size() < 2) throw Error(ErrorKind::InsufficientData, "weights need at least 2 losses");

  const double n = static_cast<double>(losses.size());
  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= n;
  double var = 0.0;
  for (double l : losses) var += (l - mean) * (l - mean);
  const double sigma = std::sqrt(var / n);

  std::vector<double> w(losses.size(), 1.0);
  if (!(sigma >= kSigmaFloor)) return w;

  const auto [lo, hi] = std::minmax_element(losses.begin(), losses.end());
  const double lmin = *lo;
  const double lmax = *hi;
  const double scale = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    w[i] = scale * (std::exp((losses[i] - lmax) / sigma) + std::exp((losses[i] - lmin) / sigma));
  }
  return w;
}

QuadExpSurface fit_quad_exp(std::span<const LossSample> samples, std::span<const double> weights) {
  if (samples.size() < 6) {
    throw Error(ErrorKind::InsufficientData,
                "surface fit needs >= 6 samples, got " + std::to_string(samples.size()));
  }
  if (weights.size() != samples.size()) {
    throw Error(ErrorKind::InsufficientData, "weights and samples differ in length");
  }

  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::Matrix<double, Eigen::Dynamic, 6> wa(rows, 6);
  Eigen::VectorXd wb(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const LossSample& s = samples[static_cast<std::size_t>(i)];
    const double w = weights[static_cast<std::size_t>(i)];
    if (!std::isfinite(s.loss) || !std::isfinite(s.alpha) || !std::isfinite(s.beta)) {
      throw Error(ErrorKind::InvalidSample, "nonfinite sample at index " + std::to_string(i));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidSample, "weight at index " + std::to_string(i) + " is not positive");
    }
    const double loss = std::max(s.loss, kLossFloor);
    wa.row(i) << s.alpha * s.alpha, s.beta * s.beta, s.alpha * s.beta, s.alpha, s.beta, 1.0;
    wa.row(i) *= w;
    wb[i] = -std::log(loss) * w;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wa);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < 6) throw Error(ErrorKind::DegenerateFit, "design matrix is rank deficient");

  const Eigen::VectorXd p = qr.solve(wb);
  QuadExpSurface out{p[0], p[1], p[2], p[3], p[4], p[5]};
  for (double v : out.coefficients()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::DegenerateFit, "fit produced nonfinite coefficients");
  }
  return out;
}

ExtremumResult solve_extremum(const QuadExpSurface& s) {
  const double det = 4.0 * s.a * s.b - s.c * s.c;
  if (!(std::abs(det) > kSingularHessian)) {
    throw Error(ErrorKind::DegenerateSurface, "exponent Hessian is singular (4ab - c^2 = " +
                                                  std::to_string(det) + ")");
  }
  // Cramer's rule on [2a c; c 2b] x = [-d; -e].
  ExtremumResult r;
  r.alpha_star = (-s.d * 2.0 * s.b + s.e * s.c) / det;
  r.beta_star = (-s.e * 2.0 * s.a + s.d * s.c) / det;
  if (det < 0.0) {
    r.kind = ExtremumKind::Saddle;
  } else {
    r.kind = s.a > 0.0 ? ExtremumKind::Maximum : ExtremumKind::Minimum;
  }
  r.predicted_loss = predict_loss(s, r.alpha_star, r.beta_star);
  r.in_simplex = r.alpha_star >= 0.0 && r.beta_star >= 0.0 && r.alpha_star + r.beta_star <= 1.0;
  return r;
}

double predict_loss(const QuadExpSurface& surface, double alpha, double beta) {
  return std::exp(-surface.exponent(alpha, beta));
}

bool within_extrapolation_bounds(const ExtremumResult& r, double slack) {
  const double reach = std::max({std::abs(r.alpha_star), std::abs(r.beta_star),
                                 std::abs(r.alpha_star + r.beta_star)});
  return reach <= 1.0 + slack;
}

}  // namespace surfmax
