#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "surfmax/error.hpp"
#include "surfmax/rbf_analysis.hpp"
#include "surfmax/synthetic_oracles.hpp"

namespace surfmax {
namespace {

std::vector<LandscapePoint> sample_points(LossOracle& oracle, int count, double scale, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LandscapePoint> pts;
  for (int i = 0; i < count; ++i) {
    LatentVector z = scale * sample_latent(rng, oracle.dim());
    const double l = oracle.eval(z);
    pts.push_back({std::move(z), l});
  }
  return pts;
}

RbfOracle two_bumps(double width, double gap) {
  RbfMixture m(2);
  m.add({1.0, Eigen::Vector2d(-gap / 2, 0), width, std::nullopt});
  m.add({1.0, Eigen::Vector2d(gap / 2, 0), width, std::nullopt});
  return RbfOracle(m);
}

TEST(CountInteriorMaxima, SmallGrids) {
  const std::vector<double> one{0, 0, 0, 0, 1, 0, 0, 0, 0};
  EXPECT_EQ(count_interior_maxima(one, 3, 3), 1);
  const std::vector<double> plateau{0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(count_interior_maxima(plateau, 3, 4), 0);
  // Peaks on the border never count.
  const std::vector<double> edge{5, 0, 0, 0, 1, 0, 0, 0, 0};
  EXPECT_EQ(count_interior_maxima(edge, 3, 3), 0);
  std::vector<double> two(5 * 5, 0.0);
  two[1 * 5 + 1] = 1.0;
  two[3 * 5 + 3] = 2.0;
  EXPECT_EQ(count_interior_maxima(two, 5, 5), 2);
  EXPECT_THROW(count_interior_maxima(two, 4, 5), Error);
}

TEST(FitRbfSurface, RecoversSingleBumpWidth) {
  RbfMixture truth(3);
  truth.add({1.0, LatentVector::Zero(3), 3.0, std::nullopt});
  RbfOracle oracle(truth);
  auto pts = sample_points(oracle, 400, 2.0, 1);
  pts.insert(pts.begin(), LandscapePoint{LatentVector::Zero(3), 1.0});  // center at index 0
  RbfFitOptions opts;
  opts.n_centers = 1;
  const std::vector<double> widths{1.0, 2.0, 3.0, 4.0, 5.0};
  const RbfFitResult fit = fit_rbf_surface(pts, widths, opts);
  EXPECT_EQ(fit.width, 3.0);
  EXPECT_LE(fit.holdout_rmse, 1e-6);
  ASSERT_EQ(fit.mixture.size(), 1u);
  EXPECT_NEAR(fit.mixture.components()[0].weight, 1.0, 1e-6);
}

TEST(FitRbfSurface, ZeroLossesGiveZeroWeights) {
  ConstantOracle zero(4, 0.0);
  const auto pts = sample_points(zero, 100, 1.0, 2);
  const std::vector<double> widths{1.0};
  const RbfFitResult fit = fit_rbf_surface(pts, widths);
  for (const auto& c : fit.mixture.components()) EXPECT_EQ(c.weight, 0.0);
  EXPECT_EQ(fit.mixture.size(), 10u);
}

TEST(FitRbfSurface, InterpolatesWhenEveryPointIsACenter) {
  Rng rng(3);
  RbfOracle oracle(random_rbf_mixture(rng, 2));
  const auto pts = sample_points(oracle, 60, 1.0, 4);
  RbfFitOptions opts;
  opts.n_centers = 60;
  opts.ridge = 0.0;
  opts.holdout_fraction = 0.0;
  const std::vector<double> widths{0.5};
  const RbfFitResult fit = fit_rbf_surface(pts, widths, opts);
  EXPECT_LE(fit.train_rmse, 1e-6);
}

TEST(FitRbfSurface, Errors) {
  const std::vector<LandscapePoint> one{{LatentVector::Zero(2), 1.0}};
  const std::vector<double> widths{1.0};
  EXPECT_THROW(fit_rbf_surface(one, widths), Error);
  const std::vector<LandscapePoint> two{{LatentVector::Zero(2), 1.0}, {LatentVector::Ones(2), 0.5}};
  EXPECT_THROW(fit_rbf_surface(two, std::vector<double>{}), Error);
  EXPECT_THROW(fit_rbf_surface(two, std::vector<double>{-1.0}), Error);
}

TEST(TriangleExtrema, QuadExpIsUnimodal) {
  Rng rng(5);
  QuadExpOracle oracle = random_quadexp(rng, 8);
  const LandscapeReport r = count_triangle_extrema(oracle, 100, 20, 7);
  EXPECT_EQ(r.triangles_tested, 100u);
  EXPECT_EQ(r.multi_extremum_fraction, 0.0);
}

TEST(TriangleExtrema, SeparatedBumpsAreMultimodal) {
  RbfOracle oracle = two_bumps(0.5, 20.0);
  LandscapeOptions opts;
  opts.latent_scale = 12.0;
  const LandscapeReport r = count_triangle_extrema(oracle, 200, 64, 11, opts);
  EXPECT_GT(r.multi_extremum_fraction, 0.0);
}

TEST(TriangleExtrema, EmptyAndInvalid) {
  ConstantOracle flat(3, 1.0);
  EXPECT_EQ(count_triangle_extrema(flat, 0, 8, 0).multi_extremum_fraction, 0.0);
  EXPECT_THROW(count_triangle_extrema(flat, 10, 7, 0), Error);
}

TEST(TriangleExtrema, SerialMatchesParallelAndIsDeterministic) {
  Rng rng(8);
  RbfMixtureSpec spec;
  spec.min_width = 0.5;
  spec.max_width = 1.0;
  spec.center_scale = 3.0;
  RbfOracle oracle(random_rbf_mixture(rng, 4, spec));
  LandscapeOptions par;
  par.latent_scale = 3.0;
  LandscapeOptions ser = par;
  ser.policy = ExecutionPolicy::Serial;
  const double a = count_triangle_extrema(oracle, 150, 16, 21, par).multi_extremum_fraction;
  const double b = count_triangle_extrema(oracle, 150, 16, 21, par).multi_extremum_fraction;
  const double c = count_triangle_extrema(oracle, 150, 16, 21, ser).multi_extremum_fraction;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

// Narrower bumps on the same centers give more multimodal triangles.
TEST(TriangleExtrema, FractionShrinksWithWidth) {
  Rng rng(13);
  RbfMixtureSpec spec;
  spec.min_components = spec.max_components = 30;
  spec.center_scale = 3.0;
  const RbfMixture base = random_rbf_mixture(rng, 3, spec);
  LandscapeOptions opts;
  opts.latent_scale = 3.0;
  double prev = 2.0, first = -1.0;
  for (double width : {0.5, 1.0, 2.0, 4.0}) {
    RbfMixture m(3);
    for (auto c : base.components()) {
      c.width = width;
      m.add(std::move(c));
    }
    RbfOracle oracle(std::move(m));
    const double f = count_triangle_extrema(oracle, 300, 24, 17, opts).multi_extremum_fraction;
    EXPECT_LE(f, prev) << "width " << width;
    if (first < 0.0) first = f;
    prev = f;
  }
  EXPECT_LT(prev, first);
}

}  // namespace
}  // namespace surfmax
