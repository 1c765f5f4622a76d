#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace apollo {

using Fingerprint = std::array<std::uint8_t, 32>;

Fingerprint sha256(std::string_view data);
std::string to_hex(const Fingerprint& fp);

// 64-bit mixing for hash tables (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace apollo
