#include "fatpad/error.hpp"

namespace fatpad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::EmptyMesh: return "empty-mesh";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidTopology: return "invalid-topology";
    case ErrorCode::TopologyMismatch: return "topology-mismatch";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::StaleCache: return "stale-cache";
    case ErrorCode::CorruptStream: return "corrupt-stream";
    case ErrorCode::DegenerateHull: return "degenerate-hull";
    case ErrorCode::ConstructionFailure: return "construction-failure";
    case ErrorCode::OnBoundary: return "on-boundary";
    case ErrorCode::NoIntersection: return "no-intersection";
    case ErrorCode::InvalidHandlePlacement: return "invalid-handle-placement";
    case ErrorCode::FixedVertex: return "fixed-vertex";
    case ErrorCode::UnknownHandle: return "unknown-handle";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace fatpad
