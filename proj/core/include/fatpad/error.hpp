#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fatpad {

enum class ErrorCode {
  Parse,
  EmptyMesh,
  InvalidArgument,
  InvalidTopology,
  TopologyMismatch,
  Validation,
  StaleCache,
  CorruptStream,
  DegenerateHull,
  ConstructionFailure,
  OnBoundary,
  NoIntersection,
  InvalidHandlePlacement,
  FixedVertex,
  UnknownHandle,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fatpad
