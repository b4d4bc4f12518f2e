#include "tacpred/lshf.hpp"

#include <algorithm>
#include <unordered_set>

#include "tacpred/hash.hpp"

namespace tacpred {

using lshf_detail::Entry;
using lshf_detail::Trie;
using lshf_detail::TriePtr;

namespace {

// Bit of the (sorted) insertion path at a given depth. Positions past the
// zeros run are 1, which also extends short paths consistently with the
// sorted order: once the ones start they never stop.
bool path_bit(std::uint32_t zeros, std::size_t depth) { return depth >= zeros; }

std::uint32_t count_zeros(const BitHashFamily& family, std::size_t trie_index,
                          const FeatureVector& f) {
  std::uint32_t zeros = 0;
  for (const auto& [id, count] : f.entries()) {
    (void)count;
    if (!family.bit(trie_index, id)) ++zeros;
  }
  return zeros;
}

TriePtr make_leaf(PList<Entry> bucket) {
  auto t = std::make_shared<Trie>();
  t->bucket = std::move(bucket);
  return t;
}

TriePtr make_node(TriePtr left, TriePtr right) {
  auto t = std::make_shared<Trie>();
  t->left = std::move(left);
  t->right = std::move(right);
  return t;
}

TriePtr insert_into(const TriePtr& t, std::size_t depth, std::size_t max_depth,
                    const Entry& e) {
  if (!t->leaf()) {
    if (path_bit(e.zeros, depth))
      return make_node(t->left, insert_into(t->right, depth + 1, max_depth, e));
    return make_node(insert_into(t->left, depth + 1, max_depth, e), t->right);
  }
  if (depth == max_depth || t->bucket.empty())
    return make_leaf(t->bucket.push_front(e));

  // Occupied leaf above the depth cap: split one level, re-descending the
  // stored entries by their own path bits, then continue with e.
  std::vector<Entry> lefts, rights;
  for (const auto& stored : t->bucket)
    (path_bit(stored.zeros, depth) ? rights : lefts).push_back(stored);
  TriePtr split = make_node(make_leaf(PList<Entry>::from_range(lefts)),
                            make_leaf(PList<Entry>::from_range(rights)));
  return insert_into(split, depth, max_depth, e);
}

struct TrieCursor {
  const Trie* trie;
  std::size_t index;  // which trie of the forest, for path lookup
};

struct QueryContext {
  std::vector<std::uint32_t> zeros;  // per trie
  std::vector<std::size_t> path_len;
  std::size_t k = 0;
  std::vector<ExampleRef> out;
  std::unordered_set<std::uint64_t> seen;  // by seq

  void offer(const ExampleRef& e) {
    if (seen.insert(e->seq).second) out.push_back(e);
  }
};

void collect(const Trie* t, QueryContext& ctx) {
  if (t->leaf()) {
    for (const auto& entry : t->bucket) ctx.offer(entry.example);
    return;
  }
  collect(t->left.get(), ctx);
  collect(t->right.get(), ctx);
}

// One level of the simultaneous descent: each trie follows the next bit of
// its own path; leaves, exhausted paths and the branches not taken form the
// irrelevant set, collected on unwind while fewer than k distinct neighbors
// have been gathered (deepest level first).
void descend(const std::vector<TrieCursor>& active, std::size_t depth,
             QueryContext& ctx) {
  std::vector<TrieCursor> relevant;
  std::vector<const Trie*> irrelevant;
  for (const TrieCursor& c : active) {
    if (c.trie->leaf() || depth >= ctx.path_len[c.index]) {
      irrelevant.push_back(c.trie);
      continue;
    }
    bool bit = path_bit(ctx.zeros[c.index], depth);
    relevant.push_back({bit ? c.trie->right.get() : c.trie->left.get(), c.index});
    irrelevant.push_back(bit ? c.trie->left.get() : c.trie->right.get());
  }
  if (!relevant.empty()) descend(relevant, depth + 1, ctx);
  if (ctx.out.size() < ctx.k)
    for (const Trie* t : irrelevant) collect(t, ctx);
}

}  // namespace

bool MixBitHashFamily::bit(std::size_t trie_index, std::uint32_t id) const {
  std::uint64_t h = mix64(seed_ ^ mix64(static_cast<std::uint64_t>(trie_index) + 1));
  return (mix64(h ^ static_cast<std::uint64_t>(id)) & 1u) != 0;
}

std::vector<std::uint8_t> path_of(const BitHashFamily& family, std::size_t trie_index,
                                  const FeatureVector& f, std::size_t max_depth) {
  std::uint32_t zeros = count_zeros(family, trie_index, f);
  std::size_t len = std::min(f.distinct_count(), max_depth);
  std::vector<std::uint8_t> bits(len);
  for (std::size_t d = 0; d < len; ++d) bits[d] = path_bit(zeros, d) ? 1 : 0;
  return bits;
}

LshForest::LshForest(LshForestParams params, std::shared_ptr<const BitHashFamily> family)
    : family_(std::move(family)), max_depth_(params.max_depth) {
  if (params.n_tries == 0) throw std::invalid_argument("forest needs at least one trie");
  if (!family_) throw std::invalid_argument("hash family must be set");
  tries_.reserve(params.n_tries);
  for (std::size_t i = 0; i < params.n_tries; ++i) tries_.push_back(make_leaf({}));
}

void LshForest::insert(const ExampleRef& e) {
  for (std::size_t i = 0; i < tries_.size(); ++i) {
    Entry entry{e, count_zeros(*family_, i, e->features)};
    tries_[i] = insert_into(tries_[i], 0, max_depth_, entry);
  }
  store_.push_back(e);
}

std::vector<ExampleRef> LshForest::query(const FeatureVector& f, std::size_t k,
                                         bool resort,
                                         const FeatureInterner& interner) const {
  QueryContext ctx;
  ctx.k = k;
  ctx.zeros.reserve(tries_.size());
  ctx.path_len.reserve(tries_.size());
  std::vector<TrieCursor> active;
  active.reserve(tries_.size());
  for (std::size_t i = 0; i < tries_.size(); ++i) {
    ctx.zeros.push_back(count_zeros(*family_, i, f));
    ctx.path_len.push_back(std::min(f.distinct_count(), max_depth_));
    active.push_back({tries_[i].get(), i});
  }
  descend(active, 0, ctx);

  if (resort) {
    std::vector<std::pair<double, ExampleRef>> scored;
    scored.reserve(ctx.out.size());
    for (const auto& e : ctx.out)
      scored.emplace_back(weighted_jaccard(interner, f, e->features), e);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second->seq > y.second->seq;
    });
    ctx.out.clear();
    for (auto& [score, e] : scored) {
      (void)score;
      ctx.out.push_back(std::move(e));
    }
  }
  return ctx.out;
}

std::vector<std::uint64_t> LshForest::predict(const FeatureVector& f, std::size_t k,
                                              bool resort,
                                              const FeatureInterner& interner) const {
  std::vector<ExampleRef> neighbors = query(f, k, resort, interner);
  std::vector<std::uint64_t> tactics =
      rank_tactics(std::span<const ExampleRef>(neighbors));
  if (tactics.size() > k) tactics.resize(k);
  return tactics;
}

}  // namespace tacpred
