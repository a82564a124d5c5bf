#include "surfmax/synthetic_oracles.hpp"

#include <cmath>
#include <string>

#include "surfmax/error.hpp"

namespace surfmax {

namespace {

// Squared Mahalanobis distance scaled by 1/2, and the gradient factor S^-1 (mu - z).
double half_mahalanobis(const RbfComponent& c, const LatentVector& z) {
  if (c.axis_widths) return 0.5 * ((z - c.center).array() / c.axis_widths->array()).square().sum();
  return 0.5 * (z - c.center).squaredNorm() / (c.width * c.width);
}

void validate_component(const RbfComponent& c, Eigen::Index dim) {
  if (c.center.size() != dim) throw Error(ErrorKind::Dimension, "RBF center dimension mismatch");
  if (!(c.width > 0.0)) throw Error(ErrorKind::Config, "RBF width must be positive");
  if (c.axis_widths) {
    if (c.axis_widths->size() != dim) throw Error(ErrorKind::Dimension, "RBF axis widths mismatch");
    if (!(c.axis_widths->array() > 0.0).all()) {
      throw Error(ErrorKind::Config, "RBF axis widths must be positive");
    }
  }
}

void check_size(Eigen::Index expected, const LatentVector& z) {
  if (z.size() != expected) {
    throw Error(ErrorKind::Dimension, "expected dimension " + std::to_string(expected) + ", got " +
                                          std::to_string(z.size()));
  }
}

}  // namespace

RbfMixture::RbfMixture(Eigen::Index dim, std::vector<RbfComponent> components) : dim_(dim) {
  for (auto& c : components) add(std::move(c));
}

void RbfMixture::add(RbfComponent component) {
  validate_component(component, dim_);
  components_.push_back(std::move(component));
}

double rbf_eval(const RbfMixture& m, const LatentVector& z) {
  check_size(m.dim(), z);
  double sum = 0.0;
  for (const auto& c : m.components()) sum += c.weight * std::exp(-half_mahalanobis(c, z));
  return sum;
}

LatentVector rbf_grad(const RbfMixture& m, const LatentVector& z) {
  check_size(m.dim(), z);
  LatentVector g = LatentVector::Zero(m.dim());
  for (const auto& c : m.components()) {
    const double bump = c.weight * std::exp(-half_mahalanobis(c, z));
    if (c.axis_widths) {
      g.array() += bump * (c.center - z).array() / c.axis_widths->array().square();
    } else {
      g += (bump / (c.width * c.width)) * (c.center - z);
    }
  }
  return g;
}

double RbfOracle::eval(const LatentVector& z) { return rbf_eval(mixture_, z); }

LatentVector RbfOracle::grad(const LatentVector& z) { return rbf_grad(mixture_, z); }

RbfMixture random_rbf_mixture(Rng& rng, Eigen::Index dim, const RbfMixtureSpec& spec) {
  if (spec.min_components < 0 || spec.max_components < spec.min_components) {
    throw Error(ErrorKind::Config, "invalid RBF component range");
  }
  if (!(spec.min_width > 0.0) || spec.max_width < spec.min_width) {
    throw Error(ErrorKind::Config, "invalid RBF width range");
  }
  std::uniform_int_distribution<int> count(spec.min_components, spec.max_components);
  std::uniform_real_distribution<double> width(spec.min_width, spec.max_width);
  std::uniform_real_distribution<double> weight(spec.min_weight, spec.max_weight);

  RbfMixture m(dim);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    RbfComponent c;
    c.weight = weight(rng);
    c.center = spec.center_scale * sample_latent(rng, dim);
    c.width = width(rng);
    if (spec.anisotropic) {
      Eigen::VectorXd axes(dim);
      for (Eigen::Index j = 0; j < dim; ++j) axes[j] = width(rng);
      c.width = axes.minCoeff();
      c.axis_widths = std::move(axes);
    }
    m.add(std::move(c));
  }
  return m;
}

QuadExpOracle::QuadExpOracle(LatentVector mu, Eigen::MatrixXd curvature, double log_scale)
    : mu_(std::move(mu)), m_(std::move(curvature)), k_(log_scale) {
  if (m_.rows() != m_.cols() || m_.rows() != mu_.size()) {
    throw Error(ErrorKind::Config, "curvature must be square and match the peak dimension");
  }
  if (!m_.isApprox(m_.transpose(), 1e-12)) throw Error(ErrorKind::Config, "curvature is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Config, "curvature is not positive definite");
}

double QuadExpOracle::value(const LatentVector& z) const {
  check_size(mu_.size(), z);
  const LatentVector r = z - mu_;
  return std::exp(-r.dot(m_ * r) + k_);
}

LatentVector QuadExpOracle::gradient(const LatentVector& z) const {
  check_size(mu_.size(), z);
  const LatentVector r = z - mu_;
  const LatentVector mr = m_ * r;
  return (-2.0 * std::exp(-r.dot(mr) + k_)) * mr;
}

QuadExpSurface QuadExpOracle::restricted_surface(const TrianglePlane& tri) const {
  // z(alpha, beta) - mu = w + alpha e1 + beta e2 with w = z3 - mu.
  const LatentVector e1 = tri.z1 - tri.z3;
  const LatentVector e2 = tri.z2 - tri.z3;
  const LatentVector w = tri.z3 - mu_;
  const LatentVector me1 = m_ * e1;
  const LatentVector me2 = m_ * e2;
  QuadExpSurface s;
  s.a = e1.dot(me1);
  s.b = e2.dot(me2);
  s.c = 2.0 * e1.dot(me2);
  s.d = 2.0 * w.dot(me1);
  s.e = 2.0 * w.dot(me2);
  s.f = w.dot(m_ * w) - k_;
  return s;
}

Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index dim, double eig_min, double eig_max) {
  if (!(eig_min > 0.0) || eig_max < eig_min) throw Error(ErrorKind::Config, "invalid eigenvalue range");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = normal(rng);

  // Haar orthogonal: Q from QR with the signs of diag(R) folded in.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }

  std::uniform_real_distribution<double> log_eig(std::log(eig_min), std::log(eig_max));
  Eigen::VectorXd lambda(dim);
  for (Eigen::Index i = 0; i < dim; ++i) lambda[i] = std::exp(log_eig(rng));

  Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

QuadExpOracle random_quadexp(Rng& rng, Eigen::Index dim, const QuadExpFamilySpec& spec) {
  Eigen::MatrixXd m = random_spd(rng, dim, spec.eig_min, spec.eig_max);
  LatentVector mu = sample_latent(rng, dim);
  return QuadExpOracle(std::move(mu), std::move(m), spec.log_scale);
}

QuadExpOracle placed_quadexp(Rng& rng, const LatentVector& z1, const LatentVector& z2,
                             const QuadExpFamilySpec& spec) {
  if (z1.size() != z2.size()) throw Error(ErrorKind::Dimension, "z1 and z2 differ in dimension");
  const Eigen::Index n = z1.size();
  const double side = (z2 - z1).norm();
  if (!(side > 0.0)) throw Error(ErrorKind::DegenerateTriangle, "z2 coincides with z1");

  Eigen::MatrixXd m = random_spd(rng, n, spec.eig_min, spec.eig_max);
  const double spread = spec.peak_offset * side / std::sqrt(static_cast<double>(n));

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    LatentVector mu = z1 + spread * sample_latent(rng, n);
    // The oracle gradient at z1 points along M (mu - z1).
    const LatentVector ascent = m * (mu - z1);
    if (!(ascent.norm() > 0.0)) continue;
    const TrianglePlane tri{z1, z2, z1 + side * ascent.normalized()};
    const LatentVector e1 = tri.z1 - tri.z3;
    const LatentVector e2 = tri.z2 - tri.z3;
    const LatentVector w = tri.z3 - mu;
    Eigen::Matrix2d h;
    h << e1.dot(m * e1), e1.dot(m * e2), e2.dot(m * e1), e2.dot(m * e2);
    const Eigen::Vector2d rhs(-w.dot(m * e1), -w.dot(m * e2));
    const Eigen::Vector2d ab = h.ldlt().solve(rhs);
    const double margin = spec.interior_margin;
    if (ab[0] >= margin && ab[1] >= margin && 1.0 - ab[0] - ab[1] >= margin) {
      return QuadExpOracle(std::move(mu), std::move(m), spec.log_scale);
    }
  }
  throw Error(ErrorKind::Config, "could not place a quad-exp peak with an interior restricted maximum");
}

}  // namespace surfmax
