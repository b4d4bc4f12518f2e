#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tacpred/example.hpp"
#include "tacpred/persist.hpp"
#include "tacpred/similarity.hpp"

namespace tacpred {

/// Family of per-trie hash functions mapping a feature id to a single bit.
/// Abstract so tests can pin bits and alternative path schemes can be
/// swapped in behind the same trie machinery.
class BitHashFamily {
 public:
  virtual ~BitHashFamily() = default;
  /// Bit of feature `id` in trie `trie_index` (0-based).
  virtual bool bit(std::size_t trie_index, std::uint32_t id) const = 0;
  /// Seed for snapshots; 0 for families that are not seed-derived.
  virtual std::uint64_t seed() const { return 0; }
};

/// Default family: mixes (seed, trie index, feature id) down to one bit.
class MixBitHashFamily final : public BitHashFamily {
  std::uint64_t seed_;

 public:
  explicit MixBitHashFamily(std::uint64_t seed) : seed_(seed) {}
  bool bit(std::size_t trie_index, std::uint32_t id) const override;
  std::uint64_t seed() const override { return seed_; }
};

/// The sorted multiset of per-feature bits of the query's distinct features
/// (all 0s, then all 1s), truncated to max_depth. An empty feature set
/// yields the empty path.
std::vector<std::uint8_t> path_of(const BitHashFamily& family, std::size_t trie_index,
                                  const FeatureVector& f, std::size_t max_depth);

namespace lshf_detail {

struct Entry {
  ExampleRef example;
  std::uint32_t zeros;  // distinct features hashing to 0 in this trie
};

/// Either a leaf holding a bucket or an inner node; left is bit 0.
struct Trie {
  std::shared_ptr<const Trie> left, right;
  PList<Entry> bucket;

  bool leaf() const { return left == nullptr; }
};

using TriePtr = std::shared_ptr<const Trie>;

}  // namespace lshf_detail

struct LshForestParams {
  std::size_t n_tries = 11;
  std::size_t max_depth = 20;
};

/// Persistent locality-sensitive hashing forest for approximate k-NN under
/// Jaccard similarity. A value type: copies are independent versions, insert
/// mutates only this version, and any retained copy keeps answering queries
/// exactly as before.
class LshForest {
  std::vector<lshf_detail::TriePtr> tries_;
  std::shared_ptr<const BitHashFamily> family_;
  std::size_t max_depth_;
  CowVec<ExampleRef> store_;  // insertion order, for size and snapshots

 public:
  LshForest(LshForestParams params, std::shared_ptr<const BitHashFamily> family);

  std::size_t size() const { return store_.size(); }
  std::size_t n_tries() const { return tries_.size(); }
  std::size_t max_depth() const { return max_depth_; }
  const BitHashFamily& family() const { return *family_; }
  const CowVec<ExampleRef>& store() const { return store_; }
  const std::vector<lshf_detail::TriePtr>& tries() const { return tries_; }

  /// Inserts the example into every trie along its bit path.
  void insert(const ExampleRef& e);

  /// Simultaneous descent over all tries: gathers candidate neighbors from
  /// the buckets nearest the query's paths, widening level by level until at
  /// least k distinct examples are collected. Duplicates are filtered by seq
  /// (first occurrence kept). With resort, candidates are reordered by true
  /// TfIdf-weighted Jaccard against the query (ties toward higher seq).
  /// Returns every gathered candidate; truncation to k happens in predict.
  std::vector<ExampleRef> query(const FeatureVector& f, std::size_t k, bool resort,
                                const FeatureInterner& interner) const;

  /// Deduplicated tactics of query(...), truncated to k entries.
  std::vector<std::uint64_t> predict(const FeatureVector& f, std::size_t k, bool resort,
                                     const FeatureInterner& interner) const;
};

}  // namespace tacpred
