#pragma once

#include <cstdint>

#include "surfmax/types.hpp"

namespace surfmax {

inline constexpr double kDefaultFiniteDiffStep = 1e-5;

/// Black-box scalar loss over latent vectors, optionally with a gradient.
///
/// Calls are not const: external oracles hold a connection and counting
/// wrappers mutate counters. An instance serves one attack at a time unless
/// thread_safe() says otherwise.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double eval(const LatentVector& z) = 0;

  virtual bool has_gradient() const { return false; }
  /// Native gradient. The default throws OracleFailure; callers that accept
  /// eval-only oracles should go through oracle_gradient().
  virtual LatentVector grad(const LatentVector& z);

  /// Whether concurrent eval/grad from several threads is allowed.
  virtual bool thread_safe() const { return false; }
};

/// Forwards to another oracle and counts each eval and grad exactly once.
class CountingOracle final : public LossOracle {
 public:
  explicit CountingOracle(LossOracle& inner) : inner_(&inner) {}

  Eigen::Index dim() const override { return inner_->dim(); }
  double eval(const LatentVector& z) override {
    ++eval_calls_;
    return inner_->eval(z);
  }
  bool has_gradient() const override { return inner_->has_gradient(); }
  LatentVector grad(const LatentVector& z) override {
    ++grad_calls_;
    return inner_->grad(z);
  }

  std::int64_t eval_calls() const { return eval_calls_; }
  std::int64_t grad_calls() const { return grad_calls_; }
  void reset() { eval_calls_ = grad_calls_ = 0; }

 private:
  LossOracle* inner_;
  std::int64_t eval_calls_ = 0;
  std::int64_t grad_calls_ = 0;
};

/// Central differences, one coordinate at a time: 2n eval calls.
LatentVector finite_diff_grad(LossOracle& oracle, const LatentVector& z,
                              double h = kDefaultFiniteDiffStep);

/// Native gradient when the oracle has one, finite differences otherwise.
LatentVector oracle_gradient(LossOracle& oracle, const LatentVector& z,
                             double h = kDefaultFiniteDiffStep);

void check_dimension(const LossOracle& oracle, const LatentVector& z, const char* what);

}  // namespace surfmax
