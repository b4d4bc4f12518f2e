#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tacpred/example.hpp"
#include "tacpred/persist.hpp"
#include "tacpred/rng.hpp"

namespace tacpred {

class EmptyLabelSetError : public std::logic_error {
 public:
  EmptyLabelSetError() : std::logic_error("impurity of an empty label set") {}
};

class DegenerateSplitError : public std::logic_error {
 public:
  DegenerateSplitError() : std::logic_error("split with an empty side") {}
};

/// 1 - sum of squared class frequencies over a nonempty label multiset.
double gini_impurity(std::span<const std::uint64_t> labels);

/// Impurity reduction of partitioning `parent` into `left` and `right`.
double information_gain(std::span<const std::uint64_t> parent,
                        std::span<const std::uint64_t> left,
                        std::span<const std::uint64_t> right);

/// Feature-presence test: examples containing the feature go left.
struct SplitRule {
  std::uint32_t feature = 0;
};

namespace rf_detail {

/// Either a leaf (label + stored examples) or an inner node with a rule.
/// Leaves carry their label histogram so the impurity check per insert costs
/// O(distinct labels) instead of rescanning the bucket.
struct Tree {
  std::shared_ptr<const Tree> left, right;
  SplitRule rule{};                // node only
  std::uint64_t label = 0;         // leaf only
  PList<ExampleRef> examples;      // leaf only
  std::vector<std::pair<std::uint64_t, std::uint32_t>> label_counts;  // sorted

  bool leaf() const { return left == nullptr; }
};

using TreePtr = std::shared_ptr<const Tree>;

/// Builds a leaf; the label histogram is derived from `examples`.
TreePtr make_leaf_tree(std::uint64_t label, PList<ExampleRef> examples);

}  // namespace rf_detail

/// Draws max(1, floor(sqrt(n))) candidate features, each taken from the
/// feature-set difference of two randomly chosen examples (retrying a draw
/// up to 16 times when the difference is empty), and returns the candidate
/// with the highest information gain of its induced partition, ties toward
/// the smaller feature id. Returns nullopt when no distinguishing feature
/// exists, in which case the caller skips the split.
std::optional<SplitRule> generate_split_rule(std::span<const ExampleRef> examples,
                                             SplitRng& rng);

/// Routes the example to a leaf by the node rules and appends it there. The
/// leaf splits into a node with two fresh leaves when its label impurity
/// exceeds `impurity_threshold` (strictly) and a split rule can be found;
/// each new leaf is labeled by a random example from its own side.
/// `leaf_cap`, when nonzero, also triggers a split attempt once a leaf holds
/// more than that many examples. Fully persistent: the input tree is
/// unchanged.
rf_detail::TreePtr add_example_to_tree(const rf_detail::TreePtr& tree,
                                       const ExampleRef& e, double impurity_threshold,
                                       SplitRng& rng, std::size_t leaf_cap = 0);

/// Leaf label reached by routing the features through the rules.
std::uint64_t predict_tree(const rf_detail::Tree& tree, const FeatureVector& f);

struct RandomForestParams {
  std::size_t n_max = 320;
  double impurity_threshold = 0.5;
  std::uint64_t seed = 0;
  std::size_t leaf_cap = 0;  // 0 = unbounded leaves (the faithful default)
};

/// Online random forest: one new single-leaf tree appears with probability
/// 1/(number of trees) per insert (up to n_max), and every pre-existing tree
/// receives every example. A persistent value like LshForest: copies are
/// versions, predictions of a retained copy never change.
class RandomForest {
  std::vector<rf_detail::TreePtr> trees_;
  RandomForestParams params_;
  SplitRng rng_;
  CowVec<ExampleRef> store_;

 public:
  explicit RandomForest(RandomForestParams params);

  std::size_t size() const { return store_.size(); }
  const std::vector<rf_detail::TreePtr>& trees() const { return trees_; }
  const RandomForestParams& params() const { return params_; }
  const SplitRng& rng() const { return rng_; }
  const CowVec<ExampleRef>& store() const { return store_; }

  void insert(const ExampleRef& e);

  /// Votes of all trees ranked by frequency, ties by first vote, truncated
  /// to k.
  std::vector<std::uint64_t> predict(const FeatureVector& f, std::size_t k) const;

  /// Snapshot restore: replaces the whole state.
  static RandomForest restore(RandomForestParams params, SplitRng rng,
                              std::vector<rf_detail::TreePtr> trees,
                              CowVec<ExampleRef> store);
};

}  // namespace tacpred
