#pragma once

// Little-endian primitives shared by the segment and spectral file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "specdep/errors.hpp"

namespace specdep::detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 1 || sizeof(T) == 4 || sizeof(T) == 8);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  template <typename T>
  T read() {
    unsigned char bytes[sizeof(T)];
    if (!in_.read(reinterpret_cast<char*>(bytes), sizeof(T)))
      throw MalformedInputError("unexpected end of file at byte " + std::to_string(offset_));
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    offset_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    if (!in_.read(got.data(), static_cast<std::streamsize>(magic.size())) || got != magic)
      throw MalformedInputError("bad magic at byte 0: expected " + std::string(magic));
    offset_ += magic.size();
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof())
      throw MalformedInputError("trailing data at byte " + std::to_string(offset_));
  }

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

}  // namespace specdep::detail
