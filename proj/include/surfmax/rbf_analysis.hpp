#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "surfmax/oracle.hpp"
#include "surfmax/synthetic_oracles.hpp"

namespace surfmax {

struct LandscapePoint {
  LatentVector z;
  double loss = 0.0;
};

struct RbfFitOptions {
  std::size_t max_components = 800;
  /// Overrides min(n_points / 10, max_components) when set.
  std::optional<std::size_t> n_centers;
  double ridge = 1e-8;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct RbfFitResult {
  RbfMixture mixture;
  double width = 0.0;
  double holdout_rmse = 0.0;
  double train_rmse = 0.0;
};

/// Fixed-center, shared-width Gaussian RBF regression.
///
/// Centers are a stride subsample of the points. For each candidate width
/// the coefficients solve the ridge system on a seeded 80% split; the width
/// with the smallest RMSE on the remaining 20% wins.
RbfFitResult fit_rbf_surface(std::span<const LandscapePoint> points,
                             std::span<const double> widths_grid, const RbfFitOptions& options = {});

struct LandscapeReport {
  std::size_t n_samples = 0;
  std::size_t n_components = 0;
  double min_width = 0.0;
  double fit_rmse = 0.0;
  std::size_t triangles_tested = 0;
  double multi_extremum_fraction = 0.0;
};

struct LandscapeOptions {
  /// Triangle vertices are drawn from N(0, latent_scale^2 I).
  double latent_scale = 1.0;
  double fd_step = kDefaultFiniteDiffStep;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
};

/// Number of strict interior local maxima of a row-major rows x cols grid
/// under 8-neighbour comparison. Boundary rows/columns are never counted.
int count_interior_maxima(std::span<const double> values, int rows, int cols);

/// Scans n_triangles random gradient-oriented triangles; triangle t draws
/// from Rng(seed + t). Reports the fraction with two or more interior
/// maxima on a grid_density x grid_density barycentric grid.
///
/// The parallel path is used only when the oracle is thread_safe().
/// Throws Config for grid_density < 8.
LandscapeReport count_triangle_extrema(LossOracle& oracle, std::size_t n_triangles,
                                       int grid_density, std::uint64_t seed,
                                       const LandscapeOptions& options = {});

}  // namespace surfmax
