#include "tacpred/rforest.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace tacpred {

using rf_detail::Tree;
using rf_detail::TreePtr;

namespace {

double gini_of_counts(const std::unordered_map<std::uint64_t, std::size_t>& counts,
                      std::size_t total) {
  double sum_sq = 0.0;
  for (const auto& [label, c] : counts) {
    (void)label;
    double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double gini_of_labels(std::span<const std::uint64_t> labels) {
  std::unordered_map<std::uint64_t, std::size_t> counts;
  for (std::uint64_t l : labels) ++counts[l];
  return gini_of_counts(counts, labels.size());
}

TreePtr make_node_tree(SplitRule rule, TreePtr left, TreePtr right) {
  auto t = std::make_shared<Tree>();
  t->rule = rule;
  t->left = std::move(left);
  t->right = std::move(right);
  return t;
}

// Sorted distinct feature ids of e1 minus those of e2.
std::vector<std::uint32_t> feature_difference(const StoredExample& e1,
                                              const StoredExample& e2) {
  std::vector<std::uint32_t> diff;
  const auto& a = e1.features.entries();
  const auto& b = e2.features.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size()) {
    if (j >= b.size() || a[i].first < b[j].first) {
      diff.push_back(a[i].first);
      ++i;
    } else if (a[i].first == b[j].first) {
      ++i;
      ++j;
    } else {
      ++j;
    }
  }
  return diff;
}

double split_gain(std::span<const ExampleRef> examples, std::uint32_t feature,
                  double parent_gini) {
  std::unordered_map<std::uint64_t, std::size_t> left, right;
  std::size_t n_left = 0, n_right = 0;
  for (const auto& e : examples) {
    if (e->features.contains(feature)) {
      ++left[e->tactic];
      ++n_left;
    } else {
      ++right[e->tactic];
      ++n_right;
    }
  }
  if (n_left == 0 || n_right == 0) return -1.0;
  double n = static_cast<double>(examples.size());
  return parent_gini - (n_left / n) * gini_of_counts(left, n_left) -
         (n_right / n) * gini_of_counts(right, n_right);
}

}  // namespace

namespace {

using LabelCounts = std::vector<std::pair<std::uint64_t, std::uint32_t>>;

LabelCounts counts_of(const PList<ExampleRef>& examples) {
  LabelCounts counts;
  for (const ExampleRef& e : examples) {
    auto it = std::lower_bound(counts.begin(), counts.end(),
                               std::make_pair(e->tactic, std::uint32_t{0}));
    if (it != counts.end() && it->first == e->tactic)
      ++it->second;
    else
      counts.insert(it, {e->tactic, 1u});
  }
  return counts;
}

LabelCounts bump_count(LabelCounts counts, std::uint64_t label) {
  auto it = std::lower_bound(counts.begin(), counts.end(),
                             std::make_pair(label, std::uint32_t{0}));
  if (it != counts.end() && it->first == label)
    ++it->second;
  else
    counts.insert(it, {label, 1u});
  return counts;
}

double gini_of_count_list(const LabelCounts& counts, std::size_t total) {
  double sum_sq = 0.0;
  for (const auto& [label, c] : counts) {
    (void)label;
    double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

}  // namespace

namespace rf_detail {

TreePtr make_leaf_tree(std::uint64_t label, PList<ExampleRef> examples) {
  auto t = std::make_shared<Tree>();
  t->label = label;
  t->label_counts = counts_of(examples);
  t->examples = std::move(examples);
  return t;
}

TreePtr make_leaf_tree_counted(std::uint64_t label, PList<ExampleRef> examples,
                               LabelCounts counts) {
  auto t = std::make_shared<Tree>();
  t->label = label;
  t->label_counts = std::move(counts);
  t->examples = std::move(examples);
  return t;
}

}  // namespace rf_detail

double gini_impurity(std::span<const std::uint64_t> labels) {
  if (labels.empty()) throw EmptyLabelSetError();
  return gini_of_labels(labels);
}

double information_gain(std::span<const std::uint64_t> parent,
                        std::span<const std::uint64_t> left,
                        std::span<const std::uint64_t> right) {
  if (left.empty() || right.empty()) throw DegenerateSplitError();
  if (parent.size() != left.size() + right.size())
    throw std::invalid_argument("split sides do not partition the parent");
  double n = static_cast<double>(parent.size());
  return gini_of_labels(parent) -
         (static_cast<double>(left.size()) / n) * gini_of_labels(left) -
         (static_cast<double>(right.size()) / n) * gini_of_labels(right);
}

std::optional<SplitRule> generate_split_rule(std::span<const ExampleRef> examples,
                                             SplitRng& rng) {
  std::size_t n = examples.size();
  if (n < 2) return std::nullopt;

  auto n_candidates = static_cast<std::size_t>(
      std::max(1.0, std::floor(std::sqrt(static_cast<double>(n)))));

  std::vector<std::uint32_t> candidates;
  candidates.reserve(n_candidates);
  for (std::size_t draw = 0; draw < n_candidates; ++draw) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      std::vector<std::uint32_t> diff = feature_difference(*examples[i], *examples[j]);
      if (diff.empty()) continue;
      candidates.push_back(diff[rng.below(diff.size())]);
      break;
    }
  }
  if (candidates.empty()) return std::nullopt;

  // Evaluate distinct candidates in ascending id order; keeping only strict
  // improvements resolves gain ties toward the smaller feature id.
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<std::uint64_t> parent_labels;
  parent_labels.reserve(n);
  for (const auto& e : examples) parent_labels.push_back(e->tactic);
  double parent_gini = gini_of_labels(parent_labels);

  std::optional<SplitRule> best;
  double best_gain = -1.0;
  for (std::uint32_t feature : candidates) {
    double gain = split_gain(examples, feature, parent_gini);
    if (gain > best_gain) {
      best_gain = gain;
      best = SplitRule{feature};
    }
  }
  if (best_gain < 0.0) return std::nullopt;
  return best;
}

TreePtr add_example_to_tree(const TreePtr& tree, const ExampleRef& e,
                            double impurity_threshold, SplitRng& rng,
                            std::size_t leaf_cap) {
  if (!tree->leaf()) {
    if (e->features.contains(tree->rule.feature))
      return make_node_tree(tree->rule,
                            add_example_to_tree(tree->left, e, impurity_threshold, rng,
                                                leaf_cap),
                            tree->right);
    return make_node_tree(tree->rule, tree->left,
                          add_example_to_tree(tree->right, e, impurity_threshold, rng,
                                              leaf_cap));
  }

  PList<ExampleRef> grown = tree->examples.push_front(e);
  LabelCounts counts = bump_count(tree->label_counts, e->tactic);

  bool over_cap = leaf_cap != 0 && grown.size() > leaf_cap;
  if (gini_of_count_list(counts, grown.size()) > impurity_threshold || over_cap) {
    std::vector<ExampleRef> all(grown.begin(), grown.end());
    if (std::optional<SplitRule> rule = generate_split_rule(all, rng)) {
      std::vector<ExampleRef> lefts, rights;
      for (const auto& ex : all)
        (ex->features.contains(rule->feature) ? lefts : rights).push_back(ex);
      if (!lefts.empty() && !rights.empty()) {
        std::uint64_t left_label = lefts[rng.below(lefts.size())]->tactic;
        std::uint64_t right_label = rights[rng.below(rights.size())]->tactic;
        return make_node_tree(
            *rule,
            rf_detail::make_leaf_tree(left_label, PList<ExampleRef>::from_range(lefts)),
            rf_detail::make_leaf_tree(right_label,
                                      PList<ExampleRef>::from_range(rights)));
      }
    }
  }
  // No split: the leaf keeps its original label.
  return rf_detail::make_leaf_tree_counted(tree->label, std::move(grown),
                                           std::move(counts));
}

std::uint64_t predict_tree(const Tree& tree, const FeatureVector& f) {
  const Tree* t = &tree;
  while (!t->leaf())
    t = f.contains(t->rule.feature) ? t->left.get() : t->right.get();
  return t->label;
}

RandomForest::RandomForest(RandomForestParams params)
    : params_(params), rng_(params.seed) {
  if (params.n_max == 0) throw std::invalid_argument("n_max must be positive");
  if (params.impurity_threshold < 0.0 || params.impurity_threshold > 1.0)
    throw std::invalid_argument("impurity threshold must be within [0, 1]");
}

void RandomForest::insert(const ExampleRef& e) {
  store_.push_back(e);
  if (trees_.empty()) {
    trees_.push_back(rf_detail::make_leaf_tree(e->tactic, PList<ExampleRef>{}.push_front(e)));
    return;
  }

  std::uint64_t m = rng_.below(trees_.size());
  std::vector<TreePtr> updated;
  updated.reserve(trees_.size() + 1);
  if (trees_.size() < params_.n_max && m == 0)
    updated.push_back(
        rf_detail::make_leaf_tree(e->tactic, PList<ExampleRef>{}.push_front(e)));
  for (const TreePtr& t : trees_)
    updated.push_back(
        add_example_to_tree(t, e, params_.impurity_threshold, rng_, params_.leaf_cap));
  trees_ = std::move(updated);
}

std::vector<std::uint64_t> RandomForest::predict(const FeatureVector& f,
                                                 std::size_t k) const {
  struct Vote {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::uint64_t, Vote> votes;
  std::size_t index = 0;
  for (const TreePtr& t : trees_) {
    std::uint64_t label = predict_tree(*t, f);
    auto [it, fresh] = votes.try_emplace(label, Vote{0, index});
    ++it->second.count;
    (void)fresh;
    ++index;
  }
  std::vector<std::pair<std::uint64_t, Vote>> ranked(votes.begin(), votes.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first < b.second.first;
  });
  std::vector<std::uint64_t> out;
  out.reserve(std::min(k, ranked.size()));
  for (const auto& [label, vote] : ranked) {
    (void)vote;
    if (out.size() == k) break;
    out.push_back(label);
  }
  return out;
}

RandomForest RandomForest::restore(RandomForestParams params, SplitRng rng,
                                   std::vector<rf_detail::TreePtr> trees,
                                   CowVec<ExampleRef> store) {
  RandomForest f(params);
  f.rng_ = rng;
  f.trees_ = std::move(trees);
  f.store_ = std::move(store);
  return f;
}

}  // namespace tacpred
