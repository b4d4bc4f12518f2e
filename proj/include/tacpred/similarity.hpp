#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tacpred/example.hpp"
#include "tacpred/persist.hpp"

namespace tacpred {

enum class SimilarityKind : std::uint8_t { kPlain = 0, kTfIdfWeighted = 1 };

class UnseenFeatureError : public std::logic_error {
 public:
  explicit UnseenFeatureError(std::uint32_t id)
      : std::logic_error("feature id " + std::to_string(id) +
                         " has not been seen in any stored example") {}
};

/// Jaccard index over the distinct feature ids (counts are ignored).
/// J(empty, empty) is defined as 1.
double jaccard(const FeatureVector& a, const FeatureVector& b);

/// ln(N / |x|_N): N the number of stored examples, |x|_N the number of
/// examples containing x. Callers must drop features never seen in the
/// database first.
double tfidf(const FeatureInterner& interner, std::uint32_t id);

/// TfIdf-weighted Jaccard: sum of weights over the intersection divided by
/// the sum over the union, on distinct ids. Features absent from the
/// database are dropped before computing; a zero-weight union yields 0.
double weighted_jaccard(const FeatureInterner& interner, const FeatureVector& a,
                        const FeatureVector& b);

/// Ordered persistent store of examples bundled with the interner that owns
/// their feature statistics. Copies are independent versions.
class ExampleDb {
  CowVec<ExampleRef> examples_;
  FeatureInterner interner_;

 public:
  ExampleDb() = default;
  explicit ExampleDb(FeatureInterner interner) : interner_(std::move(interner)) {}

  const FeatureInterner& interner() const { return interner_; }
  std::size_t size() const { return examples_.size(); }
  const ExampleRef& at(std::size_t i) const { return examples_[i]; }

  /// Records the example's features in the statistics and appends it.
  void insert(const ExampleRef& e);

  /// Appends an already-recorded example together with the interner version
  /// that reflects it (the caller called record_example itself).
  void append_recorded(const ExampleRef& e, FeatureInterner interner);

  /// Replaces the interner version (for example after interning the features
  /// of an incoming query state). Must not change total_examples.
  void adopt_interner(FeatureInterner interner);

  /// Rebuilds a db from snapshot data: the interner's statistics must
  /// already reflect the examples.
  static ExampleDb restore(FeatureInterner interner, std::span<const ExampleRef> examples);
};

struct ScoredExample {
  ExampleRef example;
  double score = 0.0;
};

/// Brute-force k-NN: scores every stored example against the query, sorts
/// descending, breaks ties toward higher seq (recency), truncates to k.
/// Also serves as the correctness oracle for the LSH forest.
std::vector<ScoredExample> knn_exact(const ExampleDb& db, const FeatureVector& query,
                                     std::size_t k, SimilarityKind kind);

/// Deduplicated tactic hashes of the neighbors in first-appearance order.
std::vector<std::uint64_t> rank_tactics(std::span<const ScoredExample> neighbors);
std::vector<std::uint64_t> rank_tactics(std::span<const ExampleRef> neighbors);

}  // namespace tacpred
