#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "fatpad/error.hpp"

namespace fatpad::detail {

// Native-endian POD stream helpers for the binary cache files.
class ByteWriter {
 public:
  template <class T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t> out;
};

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& b, std::string what) : bytes(b), what_(std::move(what)) {}
  template <class T>
  T get() {
    if (pos + sizeof(T) > bytes.size()) throw Error(ErrorCode::CorruptStream, what_ + " truncated");
    T value;
    std::memcpy(&value, bytes.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
  }
  /// Guards element counts read from the stream before allocating.
  void require(std::uint64_t count, std::size_t element_size) const {
    if (count > (bytes.size() - pos) / element_size) throw Error(ErrorCode::CorruptStream, what_ + " truncated");
  }
  bool at_end() const { return pos == bytes.size(); }

  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

 private:
  std::string what_;
};

}  // namespace fatpad::detail
