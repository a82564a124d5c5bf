#include "surfmax/oracle.hpp"

#include <string>

#include "surfmax/error.hpp"

namespace surfmax {

LatentVector LossOracle::grad(const LatentVector&) {
  throw Error(ErrorKind::OracleFailure, "oracle provides no native gradient");
}

LatentVector finite_diff_grad(LossOracle& oracle, const LatentVector& z, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Config, "finite-difference step must be positive");
  check_dimension(oracle, z, "finite_diff_grad");
  LatentVector g(z.size());
  LatentVector probe = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    probe[i] = z[i] + h;
    const double up = oracle.eval(probe);
    probe[i] = z[i] - h;
    const double down = oracle.eval(probe);
    probe[i] = z[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

LatentVector oracle_gradient(LossOracle& oracle, const LatentVector& z, double h) {
  if (oracle.has_gradient()) return oracle.grad(z);
  return finite_diff_grad(oracle, z, h);
}

void check_dimension(const LossOracle& oracle, const LatentVector& z, const char* what) {
  if (z.size() != oracle.dim()) {
    throw Error(ErrorKind::Dimension, std::string(what) + ": vector has dimension " +
                                          std::to_string(z.size()) + ", oracle expects " +
                                          std::to_string(oracle.dim()));
  }
}

}  // namespace surfmax
