#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "fatpad/posing.hpp"

namespace fatpad::cli {

/// WebSocket endpoint speaking the "fatpad.v1" subprotocol. Each connection
/// runs its own Session on its own thread. Plain HTTP GETs are answered from
/// `www` when given.
class SessionServer {
 public:
  SessionServer(std::shared_ptr<const Rig> rig, const std::string& host, unsigned short port,
                std::optional<std::filesystem::path> www = std::nullopt);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Bound port (useful with port 0).
  unsigned short port() const;
  /// SIGINT/SIGTERM stop the server; call before run().
  void stop_on_signals();
  /// Accepts connections until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int run_serve(const std::filesystem::path& bundle, const std::string& host, unsigned short port,
              const std::optional<std::filesystem::path>& www);

}  // namespace fatpad::cli
