#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "surfmax/oracle.hpp"

namespace surfmax {

struct ExternalOracleOptions {
  std::chrono::milliseconds call_timeout{30000};
};

/// Connects to a peer speaking the newline-delimited JSON oracle protocol.
///
/// `target` is either "tcp:HOST:PORT" or a shell command whose stdin/stdout
/// carry the protocol. The handshake must report `dim`; a mismatch throws
/// Protocol. Peer exit, EOF or a call exceeding the timeout throws
/// OracleUnavailable. An {"error": ...} reply throws OracleFailure.
///
/// Requests on one connection are serialized; the returned oracle is not
/// thread_safe().
std::unique_ptr<LossOracle> external_oracle_connect(const std::string& target, Eigen::Index dim,
                                                    const ExternalOracleOptions& options = {});

}  // namespace surfmax
