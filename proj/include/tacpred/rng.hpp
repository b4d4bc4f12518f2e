#pragma once

#include <cstdint>

#include "tacpred/hash.hpp"

namespace tacpred {

/// Deterministic counter-based generator (SplitMix64). A plain value type:
/// copying captures the stream position, so persistent structures can store
/// a generator and old versions replay identically.
class SplitRng {
  std::uint64_t state_;

 public:
  explicit SplitRng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Uniform draw in [0, n), n > 0. Modulo bias is negligible for the small
  /// ranges used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Derives an independent generator and advances this one.
  SplitRng split() { return SplitRng(next()); }

  std::uint64_t state() const { return state_; }
  static SplitRng from_state(std::uint64_t s) {
    SplitRng r;
    r.state_ = s;
    return r;
  }
};

}  // namespace tacpred
