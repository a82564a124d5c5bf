#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace surfmax {

// A point in the n-dimensional standard-normal latent space.
using LatentVector = Eigen::VectorXd;

// All randomness flows through explicitly owned generators of this type.
using Rng = std::mt19937_64;

// Whether a data-parallel kernel runs on the OpenMP pool or on the serial
// reference path. Both produce bit-identical results.
enum class ExecutionPolicy { Serial, Parallel };

}  // namespace surfmax
