#pragma once

#include <cstdint>
#include <string_view>

namespace tacpred {

/// 64-bit FNV-1a over bytes. Tactics are identified everywhere by this hash
/// of their text.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// SplitMix64 finalizer; the bit mixer behind seeding and the per-trie
/// feature hashes.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace tacpred
