#pragma once

#include <optional>
#include <vector>

#include "surfmax/types.hpp"

namespace surfmax {

/// Three latent vertices spanning the 2D patch on which the loss surface is
/// sampled. z3 sits on the gradient ray from z1, equidistant with z2.
struct TrianglePlane {
  LatentVector z1;
  LatentVector z2;
  LatentVector z3;

  Eigen::Index dim() const { return z1.size(); }
};

/// Convex-combination weights (alpha, beta); gamma = 1 - alpha - beta.
struct BarycentricPoint {
  double alpha = 0.0;
  double beta = 0.0;

  double gamma() const { return 1.0 - alpha - beta; }
  bool in_simplex(double tol = 0.0) const {
    return alpha >= -tol && beta >= -tol && alpha + beta <= 1.0 + tol;
  }
};

enum class BarycentricSampler { StretchedGrid, UniformRandom };

/// n independent standard-normal draws. Throws Dimension for n < 2.
LatentVector sample_latent(Rng& rng, Eigen::Index n);

/// z3 = z1 + side * grad / |grad|, where side defaults to |z2 - z1|.
///
/// Throws DegenerateGradient for a zero (or nonfinite) gradient and
/// DegenerateTriangle when z2 == z1 or the vertices are collinear.
TrianglePlane build_triangle(const LatentVector& z1, const LatentVector& z2,
                             const LatentVector& grad,
                             std::optional<double> side_length = std::nullopt);

/// r*s points on the closed simplex: alpha = i/(r-1), beta = (1-alpha) j/(s-1).
/// Row-major in i. All three vertices are included.
std::vector<BarycentricPoint> barycentric_grid(int r, int s);

/// `count` points drawn uniformly on the simplex.
std::vector<BarycentricPoint> barycentric_uniform(int count, Rng& rng);

LatentVector embed(const TrianglePlane& tri, const BarycentricPoint& p);

/// CDF of the L2 distance between two independent N(0, I_n) draws:
/// F(d; n) = 1 - Q(n/2, d^2/4). Throws Domain for d < 0 or n < 1.
double distance_cdf(double d, int n);

}  // namespace surfmax
