#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace nlos {

// Lowercase hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string sha256_hex(std::span<const std::uint8_t> data);

// splitmix64 finalizer; used to derive independent per-sample seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace nlos
