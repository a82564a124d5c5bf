#include "surfmax/latent_geometry.hpp"

#include <cmath>
#include <string>

#include "surfmax/error.hpp"
#include "surfmax/special_functions.hpp"

namespace surfmax {

LatentVector sample_latent(Rng& rng, Eigen::Index n) {
  if (n < 2) throw Error(ErrorKind::Dimension, "latent dimension must be >= 2, got " + std::to_string(n));
  std::normal_distribution<double> normal(0.0, 1.0);
  LatentVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

TrianglePlane build_triangle(const LatentVector& z1, const LatentVector& z2, const LatentVector& grad,
                             std::optional<double> side_length) {
  if (z1.size() != z2.size() || z1.size() != grad.size()) {
    throw Error(ErrorKind::Dimension, "triangle vertices and gradient differ in dimension");
  }
  const double gnorm = grad.norm();
  if (!(gnorm > 0.0) || !std::isfinite(gnorm)) {
    throw Error(ErrorKind::DegenerateGradient, "gradient at z1 is zero or nonfinite");
  }
  const double side = (z2 - z1).norm();
  if (!(side > 0.0)) throw Error(ErrorKind::DegenerateTriangle, "z2 coincides with z1");
  const double length = side_length.value_or(side);
  if (!(length > 0.0)) throw Error(ErrorKind::DegenerateTriangle, "side_length must be positive");

  TrianglePlane tri{z1, z2, z1 + (length / gnorm) * grad};

  // Affine independence: the gradient ray must not be parallel to z2 - z1.
  const LatentVector u = (z2 - z1) / side;
  const LatentVector v = grad / gnorm;
  const double cos_angle = u.dot(v);
  if (1.0 - std::abs(cos_angle) < 1e-12) {
    throw Error(ErrorKind::DegenerateTriangle, "gradient is parallel to z2 - z1");
  }
  return tri;
}

std::vector<BarycentricPoint> barycentric_grid(int r, int s) {
  if (r < 2 || s < 2) throw Error(ErrorKind::Config, "barycentric grid needs r >= 2 and s >= 2");
  if (r * s < 6) {
    throw Error(ErrorKind::InsufficientPoints,
                "r*s = " + std::to_string(r * s) + " is below the 6 surface coefficients");
  }
  std::vector<BarycentricPoint> points;
  points.reserve(static_cast<std::size_t>(r) * s);
  for (int i = 0; i < r; ++i) {
    const double u = static_cast<double>(i) / (r - 1);
    for (int j = 0; j < s; ++j) {
      const double v = static_cast<double>(j) / (s - 1);
      points.push_back({u, (1.0 - u) * v});
    }
  }
  return points;
}

std::vector<BarycentricPoint> barycentric_uniform(int count, Rng& rng) {
  if (count < 6) {
    throw Error(ErrorKind::InsufficientPoints, "need at least 6 barycentric samples");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<BarycentricPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double a = unif(rng);
    double b = unif(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    points.push_back({a, b});
  }
  return points;
}

LatentVector embed(const TrianglePlane& tri, const BarycentricPoint& p) {
  return p.alpha * tri.z1 + p.beta * tri.z2 + p.gamma() * tri.z3;
}

double distance_cdf(double d, int n) {
  if (!(d >= 0.0)) throw Error(ErrorKind::Domain, "distance must be >= 0");
  if (n < 1) throw Error(ErrorKind::Domain, "dimension must be >= 1");
  return special::gamma_p(0.5 * n, 0.25 * d * d);
}

}  // namespace surfmax
