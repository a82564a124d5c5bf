#include "surfmax/attacks.hpp"

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "surfmax/error.hpp"

namespace surfmax {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs an oracle call, prefixing any library error with where it happened.
template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.what());
  }
}

LatentVector sign_step(const LatentVector& g) { return g.array().sign().matrix(); }

void require_dims(const LossOracle& oracle, const LatentVector& z, const char* what) {
  if (z.size() != oracle.dim()) {
    throw Error(ErrorKind::Config, std::string(what) + " has dimension " + std::to_string(z.size()) +
                                       " but the oracle expects " + std::to_string(oracle.dim()));
  }
}

}  // namespace

const char* to_string(CandidatePolicy policy) {
  return policy == CandidatePolicy::EvaluateOracle ? "evaluate_oracle" : "paper_literal";
}

CandidatePolicy candidate_policy_from_string(const std::string& name) {
  if (name == "evaluate_oracle") return CandidatePolicy::EvaluateOracle;
  if (name == "paper_literal") return CandidatePolicy::PaperLiteral;
  throw Error(ErrorKind::Config, "unknown candidate policy '" + name + "'");
}

void AttackConfig::validate() const {
  if (n_dim < 2) throw Error(ErrorKind::Config, "n_dim must be >= 2");
  if (r < 2 || s < 2 || r * s < 6) throw Error(ErrorKind::Config, "need r >= 2, s >= 2 and r*s >= 6");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Config, "epsilon must be positive");
  if (pgd_steps < 1) throw Error(ErrorKind::Config, "pgd_steps must be >= 1");
  if (!(pgd_step_size > 0.0)) throw Error(ErrorKind::Config, "pgd_step_size must be positive");
  if (!(extrapolation_slack >= 0.0)) throw Error(ErrorKind::Config, "extrapolation_slack must be >= 0");
  if (!(fd_step > 0.0)) throw Error(ErrorKind::Config, "fd_step must be positive");
  if (side_length && !(*side_length > 0.0)) throw Error(ErrorKind::Config, "side_length must be positive");
}

AttackOutcome parametric_attack(LossOracle& oracle, const LatentVector& z1, const LatentVector& z2,
                                const AttackConfig& cfg) {
  cfg.validate();
  if (oracle.dim() != cfg.n_dim) {
    throw Error(ErrorKind::Config, "oracle dimension " + std::to_string(oracle.dim()) +
                                       " differs from n_dim " + std::to_string(cfg.n_dim));
  }
  require_dims(oracle, z1, "z1");
  require_dims(oracle, z2, "z2");
  if (z1 == z2) throw Error(ErrorKind::DegenerateTriangle, "z1 and z2 coincide");

  const auto start = Clock::now();
  CountingOracle counter(oracle);
  ParametricDiagnostics diag;
  AttackOutcome out;

  auto finish = [&](LatentVector z, double loss) {
    out.z_star = std::move(z);
    out.achieved_loss = loss;
    out.eval_calls = counter.eval_calls();
    out.grad_calls = counter.grad_calls();
    out.wall_time_s = seconds_since(start);
    out.diagnostics = std::move(diag);
    return std::move(out);
  };

  const LatentVector g =
      with_context("parametric_attack: gradient at z1", [&] { return oracle_gradient(counter, z1, cfg.fd_step); });

  TrianglePlane tri;
  try {
    tri = build_triangle(z1, z2, g, cfg.side_length);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateGradient && e.kind() != ErrorKind::DegenerateTriangle) throw;
    diag.fallback_used = true;
    diag.fallback_reason = e.what();
    const double l1 = with_context("parametric_attack: eval z1", [&] { return counter.eval(z1); });
    const double l2 = with_context("parametric_attack: eval z2", [&] { return counter.eval(z2); });
    return l2 > l1 ? finish(z2, l2) : finish(z1, l1);
  }

  std::vector<BarycentricPoint> points;
  if (cfg.sampler == BarycentricSampler::StretchedGrid) {
    points = barycentric_grid(cfg.r, cfg.s);
  } else {
    Rng rng(cfg.seed);
    points = barycentric_uniform(cfg.r * cfg.s, rng);
  }

  std::vector<LossSample> samples;
  std::vector<double> losses;
  samples.reserve(points.size());
  losses.reserve(points.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double l = with_context("parametric_attack: sample " + std::to_string(i),
                                  [&] { return counter.eval(embed(tri, points[i])); });
    samples.push_back({points[i].alpha, points[i].beta, l});
    losses.push_back(l);
    if (l > losses[best]) best = i;
  }
  const LatentVector best_sampled = embed(tri, points[best]);
  const double best_loss = losses[best];

  auto fallback = [&](std::string reason) {
    diag.fallback_used = true;
    diag.fallback_reason = std::move(reason);
    return finish(best_sampled, best_loss);
  };

  try {
    diag.surface = fit_quad_exp(samples, compute_weights(losses));
    diag.extremum = solve_extremum(*diag.surface);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateFit && e.kind() != ErrorKind::DegenerateSurface) throw;
    return fallback(e.what());
  }

  const ExtremumResult& ext = *diag.extremum;
  if (!within_extrapolation_bounds(ext, cfg.extrapolation_slack)) {
    return fallback("extremum lies beyond the extrapolation slack");
  }
  const LatentVector candidate = embed(tri, {ext.alpha_star, ext.beta_star});

  if (cfg.candidate_policy == CandidatePolicy::PaperLiteral) {
    if (ext.predicted_loss > best_loss) return finish(candidate, ext.predicted_loss);
    return finish(best_sampled, best_loss);
  }

  if (ext.kind != ExtremumKind::Maximum) {
    return fallback(std::string("fitted stationary point is a ") + to_string(ext.kind));
  }
  diag.candidate_evaluated = true;
  const double l_candidate =
      with_context("parametric_attack: candidate", [&] { return counter.eval(candidate); });
  if (l_candidate > best_loss) return finish(candidate, l_candidate);
  return finish(best_sampled, best_loss);
}

AttackOutcome fgsm(LossOracle& oracle, const LatentVector& z0, double epsilon, double fd_step) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Config, "epsilon must be positive");
  require_dims(oracle, z0, "z0");
  const auto start = Clock::now();
  CountingOracle counter(oracle);

  const LatentVector g = with_context("fgsm: gradient", [&] { return oracle_gradient(counter, z0, fd_step); });
  AttackOutcome out;
  out.z_star = z0 + epsilon * sign_step(g);
  out.achieved_loss = with_context("fgsm: eval", [&] { return counter.eval(out.z_star); });
  out.eval_calls = counter.eval_calls();
  out.grad_calls = counter.grad_calls();
  out.wall_time_s = seconds_since(start);
  return out;
}

AttackOutcome pgd(LossOracle& oracle, const LatentVector& z0, const AttackConfig& cfg) {
  cfg.validate();
  require_dims(oracle, z0, "z0");
  const auto start = Clock::now();
  CountingOracle counter(oracle);

  LatentVector z = z0;
  double loss = with_context("pgd: eval z0", [&] { return counter.eval(z); });
  LatentVector best_z = z;
  double best_loss = loss;
  for (int step = 0; step < cfg.pgd_steps; ++step) {
    const std::string where = "pgd: step " + std::to_string(step);
    const LatentVector g = with_context(where, [&] { return oracle_gradient(counter, z, cfg.fd_step); });
    z += cfg.pgd_step_size * sign_step(g);
    z = z0 + (z - z0).cwiseMax(-cfg.epsilon).cwiseMin(cfg.epsilon);
    loss = with_context(where, [&] { return counter.eval(z); });
    if (loss > best_loss) {
      best_loss = loss;
      best_z = z;
    }
  }

  AttackOutcome out;
  if (cfg.pgd_return_last) {
    out.z_star = z;
    out.achieved_loss = loss;
  } else {
    out.z_star = best_z;
    out.achieved_loss = best_loss;
  }
  out.eval_calls = counter.eval_calls();
  out.grad_calls = counter.grad_calls();
  out.wall_time_s = seconds_since(start);
  return out;
}

AttackOutcome random_search(LossOracle& oracle, const LatentVector& z0, int k, Rng& rng) {
  if (k < 0) throw Error(ErrorKind::Config, "random search sample count must be >= 0");
  require_dims(oracle, z0, "z0");
  const auto start = Clock::now();
  CountingOracle counter(oracle);

  AttackOutcome out;
  out.z_star = z0;
  out.achieved_loss = with_context("random_search: eval z0", [&] { return counter.eval(z0); });
  for (int i = 0; i < k; ++i) {
    LatentVector z = sample_latent(rng, z0.size());
    const double l = with_context("random_search: draw " + std::to_string(i), [&] { return counter.eval(z); });
    if (l > out.achieved_loss) {
      out.achieved_loss = l;
      out.z_star = std::move(z);
    }
  }
  out.eval_calls = counter.eval_calls();
  out.grad_calls = counter.grad_calls();
  out.wall_time_s = seconds_since(start);
  return out;
}

}  // namespace surfmax
