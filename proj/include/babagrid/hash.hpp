#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace babagrid {

// 64-bit FNV-1a with a splitmix finalizer. Shared by state hashes, rule
// signatures and manifest checksums.
class Hasher {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char ch : bytes) {
      state_ ^= ch;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update_byte(unsigned char ch) noexcept {
    state_ ^= ch;
    state_ *= 0x100000001b3ULL;
  }
  void update_u64(std::uint64_t value) noexcept {
    for (int i = 0; i < 8; ++i) update_byte(static_cast<unsigned char>(value >> (8 * i)));
  }
  std::uint64_t digest() const noexcept {
    std::uint64_t z = state_ + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t hash_bytes(std::string_view bytes) noexcept {
  Hasher h;
  h.update(bytes);
  return h.digest();
}

std::string to_hex(std::uint64_t digest);

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace babagrid
