#ifndef ESML_HASH_HPP
#define ESML_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace esml {

/// FNV-1a 64-bit; used for config fingerprints embedded in artifacts.
inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace esml

#endif  // ESML_HASH_HPP
