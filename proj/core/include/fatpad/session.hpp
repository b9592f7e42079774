#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatpad/posing.hpp"

namespace fatpad {

inline constexpr const char* kProtocol = "fatpad.v1";

/// One client's posing session. Feed it protocol text messages in arrival
/// order; each call returns the replies to send back, in order.
///
/// Client messages (JSON objects, "type" selects the kind, "seq" is echoed):
///   load                              -> load
///   grab     {handle}                 -> highlight
///   move     {handle, position|delta} -> meshDelta
///   release                           -> meshDelta (commit, empty)
///   undo                              -> meshDelta
/// Failures answer with an error message and leave the session unchanged.
class Session {
 public:
  explicit Session(std::shared_ptr<const Rig> rig, std::size_t undo_depth = 64);

  std::vector<std::string> handle(std::string_view message);

  const PoseState& state() const { return state_; }
  const std::optional<HandleId>& grabbed() const { return grabbed_; }

 private:
  std::shared_ptr<const Rig> rig_;
  PoseState state_;
  std::optional<HandleId> grabbed_;
};

/// Replays a client message log through a fresh session and returns the
/// final mesh positions.
std::vector<Vec3> replay_messages(std::shared_ptr<const Rig> rig, const std::vector<std::string>& messages);

}  // namespace fatpad
