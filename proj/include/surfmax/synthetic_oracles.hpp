#pragma once

#include <optional>
#include <vector>

#include "surfmax/latent_geometry.hpp"
#include "surfmax/oracle.hpp"
#include "surfmax/surface_fit.hpp"

namespace surfmax {

// ---------------------------------------------------------------------------
// Gaussian RBF mixtures
// ---------------------------------------------------------------------------

/// One Gaussian bump a * exp(-1/2 (z-mu)^T S^-1 (z-mu)). S is sigma^2 I, or
/// diag(axis_widths^2) when axis_widths is set.
struct RbfComponent {
  double weight = 1.0;
  LatentVector center;
  double width = 1.0;
  std::optional<Eigen::VectorXd> axis_widths;
};

class RbfMixture {
 public:
  RbfMixture() = default;
  explicit RbfMixture(Eigen::Index dim) : dim_(dim) {}
  RbfMixture(Eigen::Index dim, std::vector<RbfComponent> components);

  void add(RbfComponent component);

  Eigen::Index dim() const { return dim_; }
  const std::vector<RbfComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

 private:
  Eigen::Index dim_ = 0;
  std::vector<RbfComponent> components_;
};

double rbf_eval(const RbfMixture& m, const LatentVector& z);
LatentVector rbf_grad(const RbfMixture& m, const LatentVector& z);

class RbfOracle final : public LossOracle {
 public:
  explicit RbfOracle(RbfMixture mixture) : mixture_(std::move(mixture)) {}

  Eigen::Index dim() const override { return mixture_.dim(); }
  double eval(const LatentVector& z) override;
  bool has_gradient() const override { return true; }
  LatentVector grad(const LatentVector& z) override;
  bool thread_safe() const override { return true; }

  const RbfMixture& mixture() const { return mixture_; }

 private:
  RbfMixture mixture_;
};

struct RbfMixtureSpec {
  int min_components = 5;
  int max_components = 50;
  double min_width = 2.0;
  double max_width = 6.0;
  double min_weight = 0.5;
  double max_weight = 1.0;
  double center_scale = 1.0;
  bool anisotropic = false;
};

/// Random isotropic (or diagonal) mixture; centers ~ N(0, center_scale^2 I).
RbfMixture random_rbf_mixture(Rng& rng, Eigen::Index dim, const RbfMixtureSpec& spec = {});

// ---------------------------------------------------------------------------
// Exponential-of-quadratic oracle
// ---------------------------------------------------------------------------

/// l(z) = exp(-(z - mu)^T M (z - mu) + k) with M symmetric positive definite.
/// Its restriction to any triangle is exactly a QuadExpSurface.
class QuadExpOracle final : public LossOracle {
 public:
  /// Throws Config when M is not square/symmetric positive definite or the
  /// sizes disagree.
  QuadExpOracle(LatentVector mu, Eigen::MatrixXd curvature, double log_scale = 0.0);

  Eigen::Index dim() const override { return mu_.size(); }
  double eval(const LatentVector& z) override { return value(z); }
  bool has_gradient() const override { return true; }
  LatentVector grad(const LatentVector& z) override { return gradient(z); }
  bool thread_safe() const override { return true; }

  double value(const LatentVector& z) const;
  LatentVector gradient(const LatentVector& z) const;

  /// Closed-form pullback of the exponent through the barycentric embedding.
  QuadExpSurface restricted_surface(const TrianglePlane& tri) const;

  const LatentVector& mu() const { return mu_; }
  const Eigen::MatrixXd& curvature() const { return m_; }
  double log_scale() const { return k_; }

 private:
  LatentVector mu_;
  Eigen::MatrixXd m_;
  double k_;
};

struct QuadExpFamilySpec {
  double eig_min = 0.01;
  double eig_max = 0.1;
  double log_scale = 0.0;
  /// Peak offset from z1, as a multiple of |z2 - z1|.
  double peak_offset = 0.5;
  /// Minimum barycentric coordinate of the restricted maximizer.
  double interior_margin = 0.05;
  int max_attempts = 100000;
};

/// Random SPD curvature U diag(lambda) U^T, U Haar-orthogonal, lambda
/// log-uniform in [eig_min, eig_max].
Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index dim, double eig_min, double eig_max);

/// Quad-exp oracle with mu ~ N(0, I).
QuadExpOracle random_quadexp(Rng& rng, Eigen::Index dim, const QuadExpFamilySpec& spec = {});

/// Quad-exp oracle whose maximizer restricted to the gradient-oriented
/// triangle on (z1, z2) lies inside the simplex with the given margin.
/// mu is resampled until that holds; throws Config after max_attempts.
QuadExpOracle placed_quadexp(Rng& rng, const LatentVector& z1, const LatentVector& z2,
                             const QuadExpFamilySpec& spec = {});

// ---------------------------------------------------------------------------
// Small analytic oracles
// ---------------------------------------------------------------------------

/// l(z) = c^T z + offset.
class LinearOracle final : public LossOracle {
 public:
  explicit LinearOracle(Eigen::VectorXd slope, double offset = 0.0)
      : c_(std::move(slope)), offset_(offset) {}

  Eigen::Index dim() const override { return c_.size(); }
  double eval(const LatentVector& z) override { return c_.dot(z) + offset_; }
  bool has_gradient() const override { return true; }
  LatentVector grad(const LatentVector&) override { return c_; }
  bool thread_safe() const override { return true; }

 private:
  Eigen::VectorXd c_;
  double offset_;
};

class ConstantOracle final : public LossOracle {
 public:
  ConstantOracle(Eigen::Index dim, double value) : dim_(dim), value_(value) {}

  Eigen::Index dim() const override { return dim_; }
  double eval(const LatentVector&) override { return value_; }
  bool has_gradient() const override { return true; }
  LatentVector grad(const LatentVector&) override { return LatentVector::Zero(dim_); }
  bool thread_safe() const override { return true; }

 private:
  Eigen::Index dim_;
  double value_;
};

}  // namespace surfmax
