#pragma once

#include <initializer_list>
#include <map>
#include <vector>

#include "tacpred/example.hpp"
#include "tacpred/lshf.hpp"
#include "tacpred/rng.hpp"

namespace tacpred::testutil {

inline FeatureVector fv(std::initializer_list<std::uint32_t> ids) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  for (std::uint32_t id : ids) entries.emplace_back(id, 1u);
  return FeatureVector::from_entries(std::move(entries));
}

inline FeatureVector fv_counts(
    std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  return FeatureVector::from_entries({pairs.begin(), pairs.end()});
}

/// Hash family with explicitly pinned bits, identical across tries.
class StubBitHashFamily final : public BitHashFamily {
  std::map<std::uint32_t, bool> bits_;
  bool fallback_;

 public:
  explicit StubBitHashFamily(std::map<std::uint32_t, bool> bits, bool fallback = false)
      : bits_(std::move(bits)), fallback_(fallback) {}
  bool bit(std::size_t, std::uint32_t id) const override {
    auto it = bits_.find(id);
    return it == bits_.end() ? fallback_ : it->second;
  }
};

inline FeatureVector random_fv(SplitRng& rng, std::size_t universe,
                               std::size_t max_features) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  std::size_t n = rng.below(max_features + 1);
  for (std::size_t i = 0; i < n; ++i)
    entries.emplace_back(static_cast<std::uint32_t>(rng.below(universe)),
                         static_cast<std::uint32_t>(1 + rng.below(3)));
  return FeatureVector::from_entries(std::move(entries));
}

}  // namespace tacpred::testutil
