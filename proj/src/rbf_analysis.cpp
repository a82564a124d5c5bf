#include "surfmax/rbf_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <limits>
#include <string>

#include "surfmax/error.hpp"
#include "surfmax/latent_geometry.hpp"

namespace surfmax {

namespace {

double rmse(const Eigen::VectorXd& residual) {
  if (residual.size() == 0) return 0.0;
  return std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
}

Eigen::MatrixXd gaussian_design(const Eigen::MatrixXd& sq_dist, double width) {
  return (sq_dist.array() * (-0.5 / (width * width))).exp().matrix();
}

// True when the triangle drawn from `seed` has two or more interior maxima.
bool triangle_is_multimodal(LossOracle& oracle, const std::vector<BarycentricPoint>& grid,
                            int density, std::uint64_t seed, const LandscapeOptions& options) {
  Rng rng(seed);
  const Eigen::Index n = oracle.dim();
  const LatentVector z1 = options.latent_scale * sample_latent(rng, n);
  const LatentVector z2 = options.latent_scale * sample_latent(rng, n);
  LatentVector g = oracle_gradient(oracle, z1, options.fd_step);

  TrianglePlane tri;
  for (int attempt = 0;; ++attempt) {
    try {
      tri = build_triangle(z1, z2, g);
      break;
    } catch (const Error& e) {
      if (attempt > 16 || (e.kind() != ErrorKind::DegenerateGradient &&
                           e.kind() != ErrorKind::DegenerateTriangle)) {
        throw;
      }
      // Flat or collinear start: orient the triangle along a random direction.
      g = sample_latent(rng, n);
    }
  }

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = oracle.eval(embed(tri, grid[i]));
  return count_interior_maxima(values, density, density) >= 2;
}

}  // namespace

RbfFitResult fit_rbf_surface(std::span<const LandscapePoint> points, std::span<const double> widths_grid,
                             const RbfFitOptions& options) {
  if (points.size() < 2) throw Error(ErrorKind::InsufficientData, "RBF fit needs at least 2 points");
  if (widths_grid.empty()) throw Error(ErrorKind::Config, "widths grid is empty");
  for (double w : widths_grid) {
    if (!(w > 0.0)) throw Error(ErrorKind::Config, "widths grid entries must be positive");
  }
  if (!(options.ridge >= 0.0)) throw Error(ErrorKind::Config, "ridge must be >= 0");
  if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction < 1.0)) {
    throw Error(ErrorKind::Config, "holdout_fraction must lie in [0, 1)");
  }

  const std::size_t n = points.size();
  const Eigen::Index dim = points.front().z.size();
  for (const auto& p : points) {
    if (p.z.size() != dim) throw Error(ErrorKind::Dimension, "RBF fit points differ in dimension");
    if (!std::isfinite(p.loss)) throw Error(ErrorKind::InvalidSample, "nonfinite loss in RBF fit data");
  }

  std::size_t k = options.n_centers.value_or(std::min(n / 10, options.max_components));
  k = std::clamp<std::size_t>(k, 1, n);
  const std::size_t stride = n / k;
  std::vector<std::size_t> center_idx(k);
  for (std::size_t j = 0; j < k; ++j) center_idx[j] = j * stride;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_hold = static_cast<std::size_t>(std::floor(static_cast<double>(n) * options.holdout_fraction + 0.5));
  n_hold = std::min(n_hold, n - 1);
  const std::size_t n_train = n - n_hold;

  auto sq_dist_to_centers = [&](std::size_t first, std::size_t count) {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < count; ++i) {
      const LatentVector& z = points[order[first + i]].z;
      for (std::size_t j = 0; j < k; ++j) {
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (z - points[center_idx[j]].z).squaredNorm();
      }
    }
    return d;
  };
  auto targets = [&](std::size_t first, std::size_t count) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) y[static_cast<Eigen::Index>(i)] = points[order[first + i]].loss;
    return y;
  };

  const Eigen::MatrixXd d_train = sq_dist_to_centers(0, n_train);
  const Eigen::MatrixXd d_hold = sq_dist_to_centers(n_train, n_hold);
  const Eigen::VectorXd y_train = targets(0, n_train);
  const Eigen::VectorXd y_hold = targets(n_train, n_hold);

  RbfFitResult best;
  Eigen::VectorXd best_coeffs;
  double best_score = std::numeric_limits<double>::infinity();
  for (double width : widths_grid) {
    const Eigen::MatrixXd phi = gaussian_design(d_train, width);
    Eigen::MatrixXd normal = phi.transpose() * phi;
    normal.diagonal().array() += options.ridge;
    const Eigen::VectorXd coeffs = normal.ldlt().solve(phi.transpose() * y_train);

    const double train = rmse(phi * coeffs - y_train);
    const double hold = n_hold > 0 ? rmse(gaussian_design(d_hold, width) * coeffs - y_hold) : train;
    if (hold < best_score) {
      best_score = hold;
      best.width = width;
      best.holdout_rmse = hold;
      best.train_rmse = train;
      best_coeffs = coeffs;
    }
  }

  best.mixture = RbfMixture(dim);
  for (std::size_t j = 0; j < k; ++j) {
    RbfComponent c;
    c.weight = best_coeffs[static_cast<Eigen::Index>(j)];
    c.center = points[center_idx[j]].z;
    c.width = best.width;
    best.mixture.add(std::move(c));
  }
  return best;
}

int count_interior_maxima(std::span<const double> values, int rows, int cols) {
  if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(ErrorKind::Config, "grid shape does not match the value count");
  }
  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; };
  int count = 0;
  for (int i = 1; i + 1 < rows; ++i) {
    for (int j = 1; j + 1 < cols; ++j) {
      const double v = at(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di != 0 || dj != 0) && !(v > at(i + di, j + dj))) {
            strict = false;
            break;
          }
        }
      }
      if (strict) ++count;
    }
  }
  return count;
}

LandscapeReport count_triangle_extrema(LossOracle& oracle, std::size_t n_triangles, int grid_density,
                                       std::uint64_t seed, const LandscapeOptions& options) {
  if (grid_density < 8) throw Error(ErrorKind::Config, "grid_density must be >= 8");
  if (!(options.latent_scale > 0.0)) throw Error(ErrorKind::Config, "latent_scale must be positive");

  const auto grid = barycentric_grid(grid_density, grid_density);
  std::vector<char> multimodal(n_triangles, 0);
  std::vector<std::exception_ptr> failures(n_triangles);

  const auto count = static_cast<std::int64_t>(n_triangles);
  const bool parallel = options.policy == ExecutionPolicy::Parallel && oracle.thread_safe();
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < count; ++t) {
      try {
        multimodal[t] = triangle_is_multimodal(oracle, grid, grid_density, seed + t, options);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t t = 0; t < count; ++t) {
      try {
        multimodal[t] = triangle_is_multimodal(oracle, grid, grid_density, seed + t, options);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  LandscapeReport report;
  report.n_samples = n_triangles * grid.size();
  report.triangles_tested = n_triangles;
  const auto hits = std::count(multimodal.begin(), multimodal.end(), 1);
  report.multi_extremum_fraction =
      n_triangles == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n_triangles);
  return report;
}

}  // namespace surfmax
