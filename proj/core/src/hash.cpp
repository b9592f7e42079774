#include "fatpad/hash.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "fatpad/error.hpp"

namespace fatpad {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
}

void Fnv1a64::update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update(std::string_view text) {
  update(std::as_bytes(std::span(text.data(), text.size())));
}

// Values are fed little-endian so the digest does not depend on host order.
void Fnv1a64::update_u64(std::uint64_t value) {
  std::byte buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::byte>((value >> (8 * i)) & 0xffu);
  update(buf);
}

void Fnv1a64::update_f64(double value) {
  if (value == 0.0) value = 0.0;  // fold -0.0
  update_u64(std::bit_cast<std::uint64_t>(value));
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + 16, value, 16);
  std::string digits(buf, end);
  return std::string(16 - digits.size(), '0') + digits;
}

std::uint64_t parse_hex(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::CorruptStream, "invalid hex digest '" + std::string(text) + "'");
  return value;
}

}  // namespace fatpad
