#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "surfmax/latent_geometry.hpp"
#include "surfmax/oracle.hpp"
#include "surfmax/surface_fit.hpp"

namespace surfmax {

/// How the fitted extremum competes with the sampled points.
enum class CandidatePolicy {
  /// Evaluate the oracle at the candidate and compare true losses.
  EvaluateOracle,
  /// Compare the model-predicted loss with the sampled losses; no extra oracle call.
  PaperLiteral,
};

const char* to_string(CandidatePolicy policy);
CandidatePolicy candidate_policy_from_string(const std::string& name);

struct AttackConfig {
  Eigen::Index n_dim = 64;
  int r = 10;
  int s = 5;
  double epsilon = 1.0;
  int pgd_steps = 20;
  double pgd_step_size = 0.01;
  bool pgd_return_last = false;
  CandidatePolicy candidate_policy = CandidatePolicy::EvaluateOracle;
  double extrapolation_slack = 0.5;
  BarycentricSampler sampler = BarycentricSampler::StretchedGrid;
  std::optional<double> side_length;
  double fd_step = kDefaultFiniteDiffStep;
  std::uint64_t seed = 0;

  /// Throws Config on r*s < 6, epsilon <= 0, step size <= 0 and similar.
  void validate() const;
};

struct ParametricDiagnostics {
  std::optional<QuadExpSurface> surface;
  std::optional<ExtremumResult> extremum;
  bool candidate_evaluated = false;
  bool fallback_used = false;
  std::string fallback_reason;
};

struct AttackOutcome {
  LatentVector z_star;
  double achieved_loss = 0.0;
  std::int64_t eval_calls = 0;
  std::int64_t grad_calls = 0;
  double wall_time_s = 0.0;
  std::optional<ParametricDiagnostics> diagnostics;
};

/// Gradient-oriented triangle, surface fit and algebraic extremum.
///
/// Spends one gradient (or 2n evals when the oracle has none), r*s evals on
/// the sampled points and one more eval when the candidate is checked
/// against the oracle.
AttackOutcome parametric_attack(LossOracle& oracle, const LatentVector& z1, const LatentVector& z2,
                                const AttackConfig& cfg);

/// z* = z0 + epsilon * sign(grad(z0)), sign(0) = 0.
AttackOutcome fgsm(LossOracle& oracle, const LatentVector& z0, double epsilon,
                   double fd_step = kDefaultFiniteDiffStep);

/// Projected sign-gradient ascent inside the L-inf ball of radius epsilon
/// around z0. Returns the best iterate (or the last with pgd_return_last).
AttackOutcome pgd(LossOracle& oracle, const LatentVector& z0, const AttackConfig& cfg);

/// Best of z0 and k fresh standard-normal draws.
AttackOutcome random_search(LossOracle& oracle, const LatentVector& z0, int k, Rng& rng);

}  // namespace surfmax
