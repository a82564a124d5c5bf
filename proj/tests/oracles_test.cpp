#include <gtest/gtest.h>

#include <cmath>

#include "surfmax/error.hpp"
#include "surfmax/latent_geometry.hpp"
#include "surfmax/oracle.hpp"
#include "surfmax/synthetic_oracles.hpp"
#include "test_support.hpp"

namespace surfmax {
namespace {

RbfMixture lone_bump(Eigen::Index dim, double width) {
  RbfMixture m(dim);
  m.add({1.0, LatentVector::Zero(dim), width, std::nullopt});
  return m;
}

TEST(RbfMixture, PointValues) {
  const RbfMixture m = lone_bump(3, 2.0);
  EXPECT_DOUBLE_EQ(rbf_eval(m, LatentVector::Zero(3)), 1.0);
  EXPECT_NEAR(rbf_eval(m, Eigen::Vector3d(0, 2, 0)), 0.6065306597126334, 1e-15);
  EXPECT_EQ(rbf_eval(RbfMixture(3), Eigen::Vector3d(1, 2, 3)), 0.0);
}

TEST(RbfMixture, StationaryPoints) {
  const RbfMixture lone = lone_bump(4, 1.5);
  EXPECT_EQ(rbf_grad(lone, LatentVector::Zero(4)).norm(), 0.0);

  RbfMixture pair(2);
  pair.add({0.8, Eigen::Vector2d(-3, 1), 2.0, std::nullopt});
  pair.add({0.8, Eigen::Vector2d(3, 1), 2.0, std::nullopt});
  EXPECT_LE(rbf_grad(pair, Eigen::Vector2d(0, 1)).norm(), 1e-17);
}

TEST(RbfMixture, RejectsBadComponents) {
  RbfMixture m(2);
  try {
    m.add({1.0, Eigen::Vector2d(0, 0), 0.0, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_THROW(m.add({1.0, Eigen::Vector3d(0, 0, 0), 1.0, std::nullopt}), Error);
}

TEST(RbfMixture, GradientMatchesFiniteDifferences) {
  Rng rng(21);
  RbfOracle oracle(random_rbf_mixture(rng, 8));
  for (int i = 0; i < 100; ++i) {
    const LatentVector z = sample_latent(rng, 8);
    EXPECT_LE(testing::rel_err(finite_diff_grad(oracle, z), rbf_grad(oracle.mixture(), z)), 1e-6);
  }
}

TEST(RbfMixture, AnisotropicGradient) {
  Rng rng(22);
  RbfMixtureSpec spec;
  spec.anisotropic = true;
  RbfOracle oracle(random_rbf_mixture(rng, 6, spec));
  for (int i = 0; i < 20; ++i) {
    const LatentVector z = sample_latent(rng, 6);
    EXPECT_LE(testing::rel_err(finite_diff_grad(oracle, z), oracle.grad(z)), 1e-6);
  }
}

TEST(FiniteDiff, ExactForConstantAndAffine) {
  ConstantOracle flat(5, 0.25);
  EXPECT_EQ(finite_diff_grad(flat, LatentVector::Ones(5)).norm(), 0.0);

  const Eigen::Vector3d c(1.0, -2.0, 0.5);
  LinearOracle linear(c, 3.0);
  const LatentVector g = finite_diff_grad(linear, Eigen::Vector3d(0.3, -0.2, 0.9));
  EXPECT_LE((g - c).norm(), 1e-9);
}

TEST(FiniteDiff, SecondOrderTruncation) {
  Rng rng(31);
  RbfOracle oracle(random_rbf_mixture(rng, 4));
  const LatentVector z = sample_latent(rng, 4);
  const LatentVector exact = oracle.grad(z);
  const double h = 0.05;
  const double e1 = (finite_diff_grad(oracle, z, h) - exact).norm();
  const double e2 = (finite_diff_grad(oracle, z, h / 2) - exact).norm();
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(FiniteDiff, CountsTwoEvalsPerCoordinate) {
  ConstantOracle flat(7, 1.0);
  CountingOracle counter(flat);
  oracle_gradient(counter, LatentVector::Zero(7));
  EXPECT_EQ(counter.grad_calls(), 1);
  EXPECT_EQ(counter.eval_calls(), 0);

  struct EvalOnly final : LossOracle {
    Eigen::Index dim() const override { return 7; }
    double eval(const LatentVector& z) override { return z.sum(); }
  } eval_only;
  CountingOracle c2(eval_only);
  oracle_gradient(c2, LatentVector::Zero(7));
  EXPECT_EQ(c2.eval_calls(), 14);
  EXPECT_EQ(c2.grad_calls(), 0);
}

TEST(CountingOracle, PassesValuesThrough) {
  Rng rng(4);
  RbfOracle inner(random_rbf_mixture(rng, 5));
  CountingOracle counter(inner);
  for (int i = 0; i < 10; ++i) {
    const LatentVector z = sample_latent(rng, 5);
    EXPECT_EQ(counter.eval(z), inner.eval(z));
    EXPECT_TRUE(counter.grad(z) == inner.grad(z));
  }
  EXPECT_EQ(counter.eval_calls(), 10);
  EXPECT_EQ(counter.grad_calls(), 10);
}

TEST(QuadExpOracle, PeakAndUnitShell) {
  const LatentVector mu = Eigen::Vector3d(1, -1, 2);
  QuadExpOracle o(mu, Eigen::Matrix3d::Identity(), 0.7);
  EXPECT_NEAR(o.eval(mu), std::exp(0.7), 1e-15);
  QuadExpOracle unit(mu, Eigen::Matrix3d::Identity(), 0.0);
  EXPECT_NEAR(unit.eval(mu + Eigen::Vector3d(0, 0.6, 0.8)), std::exp(-1.0), 1e-15);
}

TEST(QuadExpOracle, RejectsNonPd) {
  Eigen::Matrix2d m;
  m << 1, 2, 2, 1;
  EXPECT_THROW(QuadExpOracle(Eigen::Vector2d(0, 0), m), Error);
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(QuadExpOracle(Eigen::Vector2d(0, 0), asym), Error);
}

TEST(QuadExpOracle, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  QuadExpOracle o = random_quadexp(rng, 16);
  for (int i = 0; i < 50; ++i) {
    const LatentVector z = sample_latent(rng, 16);
    EXPECT_LE(testing::rel_err(finite_diff_grad(o, z), o.gradient(z)), 1e-6);
  }
}

TEST(QuadExpOracle, RestrictionIsExactlyQuadExp) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const LatentVector z1 = sample_latent(rng, 64);
    const LatentVector z2 = sample_latent(rng, 64);
    QuadExpOracle o = placed_quadexp(rng, z1, z2);
    const TrianglePlane tri = build_triangle(z1, z2, o.gradient(z1));

    const auto expected = testing::pullback_by_interpolation(o, tri);
    const QuadExpSurface closed = o.restricted_surface(tri);
    EXPECT_LE(testing::max_abs_diff(closed.coefficients(), expected), 1e-9);

    std::vector<LossSample> samples;
    std::vector<double> losses;
    for (const auto& p : barycentric_grid(10, 5)) {
      const double l = o.eval(embed(tri, p));
      samples.push_back({p.alpha, p.beta, l});
      losses.push_back(l);
    }
    const QuadExpSurface fitted = fit_quad_exp(samples, compute_weights(losses));
    EXPECT_LE(testing::max_abs_diff(fitted.coefficients(), expected), 1e-7);
    for (const auto& s : samples) {
      EXPECT_LE(std::abs(std::log(predict_loss(fitted, s.alpha, s.beta)) - std::log(s.loss)), 1e-9);
    }
  }
}

TEST(PlacedQuadExp, RestrictedMaximizerIsInterior) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const LatentVector z1 = sample_latent(rng, 64);
    const LatentVector z2 = sample_latent(rng, 64);
    QuadExpOracle o = placed_quadexp(rng, z1, z2);
    const TrianglePlane tri = build_triangle(z1, z2, o.gradient(z1));
    const Eigen::Vector2d ab = testing::stationary_point(testing::pullback_by_interpolation(o, tri));
    EXPECT_GE(ab[0], 0.05 - 1e-9);
    EXPECT_GE(ab[1], 0.05 - 1e-9);
    EXPECT_GE(1.0 - ab[0] - ab[1], 0.05 - 1e-9);
  }
}

}  // namespace
}  // namespace surfmax
