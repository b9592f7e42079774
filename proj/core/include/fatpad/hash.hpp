#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fatpad {

/// Incremental 64-bit FNV-1a. Used for content fingerprints that must be
/// stable across platforms and runs, so std::hash is not an option.
class Fnv1a64 {
 public:
  void update(std::span<const std::byte> bytes);
  void update(std::string_view text);
  void update_u64(std::uint64_t value);
  void update_f64(double value);

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string to_hex(std::uint64_t value);
std::uint64_t parse_hex(std::string_view text);

}  // namespace fatpad
