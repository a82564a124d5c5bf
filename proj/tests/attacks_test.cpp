#include <gtest/gtest.h>

#include <cmath>

#include "surfmax/attacks.hpp"
#include "surfmax/error.hpp"
#include "surfmax/synthetic_oracles.hpp"
#include "test_support.hpp"

namespace surfmax {
namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a surfmax::Error";
  return ErrorKind::Io;
}

struct PlacedCase {
  LatentVector z1, z2;
  QuadExpOracle oracle;
};

PlacedCase placed(std::uint64_t seed, Eigen::Index n = 64) {
  Rng rng(seed);
  LatentVector z1 = sample_latent(rng, n);
  LatentVector z2 = sample_latent(rng, n);
  QuadExpOracle o = placed_quadexp(rng, z1, z2);
  return {std::move(z1), std::move(z2), std::move(o)};
}

TEST(ParametricAttack, FindsInteriorMaximumOfQuadExp) {
  AttackConfig cfg;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PlacedCase s = placed(seed);
    const AttackOutcome out = parametric_attack(s.oracle, s.z1, s.z2, cfg);
    ASSERT_TRUE(out.diagnostics);
    const auto& d = *out.diagnostics;
    ASSERT_TRUE(d.extremum);
    EXPECT_FALSE(d.fallback_used);
    EXPECT_TRUE(d.candidate_evaluated);
    EXPECT_EQ(d.extremum->kind, ExtremumKind::Maximum);

    const TrianglePlane tri = build_triangle(s.z1, s.z2, s.oracle.gradient(s.z1));
    const Eigen::Vector2d expected = testing::stationary_point(testing::pullback_by_interpolation(s.oracle, tri));
    EXPECT_NEAR(d.extremum->alpha_star, expected[0], 1e-6);
    EXPECT_NEAR(d.extremum->beta_star, expected[1], 1e-6);
    EXPECT_NEAR(out.achieved_loss, s.oracle.eval(out.z_star), 0.0);
    EXPECT_NEAR(d.extremum->predicted_loss, out.achieved_loss, 1e-7 * out.achieved_loss);
  }
}

TEST(ParametricAttack, DefaultBudget) {
  PlacedCase s = placed(3);
  CountingOracle outer(s.oracle);
  const AttackOutcome out = parametric_attack(outer, s.z1, s.z2, AttackConfig{});
  EXPECT_EQ(out.eval_calls, 51);
  EXPECT_EQ(out.grad_calls, 1);
  EXPECT_EQ(outer.eval_calls(), out.eval_calls);
  EXPECT_EQ(outer.grad_calls(), out.grad_calls);
}

TEST(ParametricAttack, BudgetWithoutNativeGradient) {
  struct EvalOnly final : LossOracle {
    explicit EvalOnly(QuadExpOracle& o) : inner(o) {}
    Eigen::Index dim() const override { return inner.dim(); }
    double eval(const LatentVector& z) override { return inner.eval(z); }
    QuadExpOracle& inner;
  };
  PlacedCase s = placed(4, 8);
  EvalOnly bare(s.oracle);
  AttackConfig cfg;
  cfg.n_dim = 8;
  const AttackOutcome out = parametric_attack(bare, s.z1, s.z2, cfg);
  EXPECT_EQ(out.grad_calls, 0);
  EXPECT_EQ(out.eval_calls, 2 * 8 + 50 + (out.diagnostics->candidate_evaluated ? 1 : 0));
}

TEST(ParametricAttack, ConstantOracleFallsBack) {
  ConstantOracle flat(4, 0.5);
  AttackConfig cfg;
  cfg.n_dim = 4;
  const LatentVector z1 = LatentVector::Zero(4), z2 = LatentVector::Ones(4);
  const AttackOutcome out = parametric_attack(flat, z1, z2, cfg);
  EXPECT_EQ(out.achieved_loss, 0.5);
  ASSERT_TRUE(out.diagnostics);
  EXPECT_TRUE(out.diagnostics->fallback_used);
  EXPECT_FALSE(out.diagnostics->fallback_reason.empty());
  // Zero gradient: only the two endpoints are evaluated.
  EXPECT_EQ(out.eval_calls, 2);
  EXPECT_TRUE(out.z_star == z1 || out.z_star == z2);
}

TEST(ParametricAttack, NeverWorseThanBestSample) {
  Rng rng(55);
  AttackConfig cfg;
  cfg.n_dim = 8;
  for (int trial = 0; trial < 30; ++trial) {
    RbfOracle oracle(random_rbf_mixture(rng, 8));
    const LatentVector z1 = sample_latent(rng, 8), z2 = sample_latent(rng, 8);
    const AttackOutcome out = parametric_attack(oracle, z1, z2, cfg);
    const TrianglePlane tri = build_triangle(z1, z2, oracle.grad(z1));
    double best = -1.0;
    for (const auto& p : barycentric_grid(cfg.r, cfg.s)) best = std::max(best, oracle.eval(embed(tri, p)));
    EXPECT_GE(out.achieved_loss, best);
    EXPECT_EQ(out.achieved_loss, oracle.eval(out.z_star));
  }
}

TEST(ParametricAttack, Deterministic) {
  PlacedCase s = placed(9);
  AttackConfig cfg;
  cfg.sampler = BarycentricSampler::UniformRandom;
  cfg.seed = 123;
  const AttackOutcome a = parametric_attack(s.oracle, s.z1, s.z2, cfg);
  const AttackOutcome b = parametric_attack(s.oracle, s.z1, s.z2, cfg);
  EXPECT_TRUE(a.z_star == b.z_star);
  EXPECT_EQ(a.achieved_loss, b.achieved_loss);
}

TEST(ParametricAttack, PaperLiteralReportsPrediction) {
  PlacedCase s = placed(11);
  AttackConfig cfg;
  cfg.candidate_policy = CandidatePolicy::PaperLiteral;
  const AttackOutcome out = parametric_attack(s.oracle, s.z1, s.z2, cfg);
  ASSERT_TRUE(out.diagnostics->extremum);
  EXPECT_FALSE(out.diagnostics->candidate_evaluated);
  EXPECT_EQ(out.eval_calls, 50);
  EXPECT_EQ(out.achieved_loss, out.diagnostics->extremum->predicted_loss);
}

TEST(ParametricAttack, ConfigErrors) {
  PlacedCase s = placed(2, 4);
  AttackConfig cfg;
  cfg.n_dim = 4;
  cfg.r = 2;
  cfg.s = 2;
  EXPECT_EQ(kind_of([&] { parametric_attack(s.oracle, s.z1, s.z2, cfg); }), ErrorKind::Config);
  cfg = AttackConfig{};
  EXPECT_EQ(kind_of([&] { parametric_attack(s.oracle, s.z1, s.z2, cfg); }), ErrorKind::Config);
  cfg.n_dim = 4;
  EXPECT_EQ(kind_of([&] { parametric_attack(s.oracle, s.z1, s.z1, cfg); }), ErrorKind::DegenerateTriangle);
  EXPECT_EQ(candidate_policy_from_string("paper_literal"), CandidatePolicy::PaperLiteral);
  EXPECT_EQ(kind_of([] { candidate_policy_from_string("best"); }), ErrorKind::Config);
}

TEST(Fgsm, LinearOracle) {
  LinearOracle lin(Eigen::Vector3d(1, -2, 0));
  const AttackOutcome out = fgsm(lin, Eigen::Vector3d(0, 0, 0), 1.0);
  EXPECT_TRUE(out.z_star == Eigen::Vector3d(1, -1, 0));
  EXPECT_DOUBLE_EQ(out.achieved_loss, 3.0);
  EXPECT_EQ(out.eval_calls, 1);
  EXPECT_EQ(out.grad_calls, 1);
  EXPECT_EQ(kind_of([&] { fgsm(lin, Eigen::Vector3d(0, 0, 0), 0.0); }), ErrorKind::Config);
}

TEST(Pgd, LinearDisplacementAndBudget) {
  const Eigen::Vector3d c(1, -2, 0);
  LinearOracle lin(c);
  AttackConfig cfg;
  cfg.n_dim = 3;
  const LatentVector z0 = Eigen::Vector3d(0.1, 0.2, 0.3);
  const AttackOutcome out = pgd(lin, z0, cfg);
  EXPECT_LE((out.z_star - z0 - 0.2 * Eigen::Vector3d(1, -1, 0)).norm(), 1e-12);
  EXPECT_EQ(out.eval_calls, 21);
  EXPECT_EQ(out.grad_calls, 20);
}

TEST(Pgd, SingleLargeStepEqualsFgsm) {
  Rng rng(14);
  RbfOracle oracle(random_rbf_mixture(rng, 6));
  AttackConfig cfg;
  cfg.n_dim = 6;
  cfg.epsilon = 0.3;
  cfg.pgd_steps = 1;
  cfg.pgd_step_size = 2 * cfg.epsilon;
  cfg.pgd_return_last = true;
  for (int i = 0; i < 10; ++i) {
    const LatentVector z0 = sample_latent(rng, 6);
    EXPECT_LE((pgd(oracle, z0, cfg).z_star - fgsm(oracle, z0, cfg.epsilon).z_star).norm(), 1e-12);
  }
}

TEST(Pgd, StaysInsideBall) {
  Rng rng(15);
  RbfOracle oracle(random_rbf_mixture(rng, 10));
  AttackConfig cfg;
  cfg.n_dim = 10;
  cfg.epsilon = 0.05;
  cfg.pgd_step_size = 0.02;
  cfg.pgd_steps = 50;
  for (int i = 0; i < 20; ++i) {
    const LatentVector z0 = sample_latent(rng, 10);
    const AttackOutcome out = pgd(oracle, z0, cfg);
    EXPECT_LE((out.z_star - z0).lpNorm<Eigen::Infinity>(), cfg.epsilon + 1e-12);
    EXPECT_GE(out.achieved_loss, oracle.eval(z0));
  }
}

TEST(RandomSearch, ZeroDrawsReturnsStart) {
  ConstantOracle flat(3, 2.0);
  Rng rng(1);
  const LatentVector z0 = Eigen::Vector3d(1, 2, 3);
  const AttackOutcome out = random_search(flat, z0, 0, rng);
  EXPECT_TRUE(out.z_star == z0);
  EXPECT_EQ(out.eval_calls, 1);
  EXPECT_EQ(kind_of([&] { random_search(flat, z0, -1, rng); }), ErrorKind::Config);
}

TEST(RandomSearch, ManyDrawsApproachSingleBump) {
  RbfMixture m(2);
  m.add({1.0, Eigen::Vector2d(0.5, -0.5), 1.0, std::nullopt});
  RbfOracle oracle(m);
  Rng rng(3);
  const AttackOutcome out = random_search(oracle, Eigen::Vector2d(3, 3), 10000, rng);
  EXPECT_GE(out.achieved_loss, 0.95);
  EXPECT_EQ(out.eval_calls, 10001);
}

}  // namespace
}  // namespace surfmax
