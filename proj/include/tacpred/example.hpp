#pragma once

#include <cstdint>
#include <memory>

#include "tacpred/features.hpp"

namespace tacpred {

/// One training pair: a featurized proof state and the tactic (by hash) that
/// advanced it. seq is the chronological position in the corpus.
struct StoredExample {
  FeatureVector features;
  std::uint64_t tactic = 0;
  std::uint64_t seq = 0;
};

using ExampleRef = std::shared_ptr<const StoredExample>;

inline ExampleRef make_example(FeatureVector fv, std::uint64_t tactic, std::uint64_t seq) {
  auto e = std::make_shared<StoredExample>();
  e->features = std::move(fv);
  e->tactic = tactic;
  e->seq = seq;
  return e;
}

}  // namespace tacpred
