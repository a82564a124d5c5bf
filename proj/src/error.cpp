#include "surfmax/error.hpp"

namespace surfmax {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateGradient: return "degenerate gradient";
    case ErrorKind::DegenerateTriangle: return "degenerate triangle";
    case ErrorKind::InsufficientPoints: return "insufficient points";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::InvalidSample: return "invalid sample";
    case ErrorKind::DegenerateFit: return "degenerate fit";
    case ErrorKind::DegenerateSurface: return "degenerate surface";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Protocol: return "protocol error";
    case ErrorKind::OracleUnavailable: return "oracle unavailable";
    case ErrorKind::OracleFailure: return "oracle failure";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

}  // namespace surfmax
