#include "tacpred/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace tacpred {

namespace {

// Walks two sorted entry lists, invoking on_common for shared ids and
// on_only for ids present in exactly one input.
template <typename FCommon, typename FOnly>
void merge_ids(const FeatureVector& a, const FeatureVector& b, FCommon on_common,
               FOnly on_only) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first == eb[j].first) {
      on_common(ea[i].first);
      ++i;
      ++j;
    } else if (ea[i].first < eb[j].first) {
      on_only(ea[i].first);
      ++i;
    } else {
      on_only(eb[j].first);
      ++j;
    }
  }
  for (; i < ea.size(); ++i) on_only(ea[i].first);
  for (; j < eb.size(); ++j) on_only(eb[j].first);
}

bool seen_in_db(const FeatureInterner& interner, std::uint32_t id) {
  return id < interner.size() && interner.doc_count(id) > 0;
}

}  // namespace

double jaccard(const FeatureVector& a, const FeatureVector& b) {
  std::size_t common = 0, only = 0;
  merge_ids(
      a, b, [&](std::uint32_t) { ++common; }, [&](std::uint32_t) { ++only; });
  std::size_t uni = common + only;
  if (uni == 0) return 1.0;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double tfidf(const FeatureInterner& interner, std::uint32_t id) {
  if (id >= interner.size()) throw UnknownFeatureIdError(id);
  std::uint32_t df = interner.doc_count(id);
  if (df == 0) throw UnseenFeatureError(id);
  return std::log(static_cast<double>(interner.total_examples()) /
                  static_cast<double>(df));
}

double weighted_jaccard(const FeatureInterner& interner, const FeatureVector& a,
                        const FeatureVector& b) {
  double inter_w = 0.0, union_w = 0.0;
  merge_ids(
      a, b,
      [&](std::uint32_t id) {
        if (!seen_in_db(interner, id)) return;
        double w = tfidf(interner, id);
        inter_w += w;
        union_w += w;
      },
      [&](std::uint32_t id) {
        if (!seen_in_db(interner, id)) return;
        union_w += tfidf(interner, id);
      });
  if (union_w == 0.0) return 0.0;
  return inter_w / union_w;
}

void ExampleDb::insert(const ExampleRef& e) {
  record_example(interner_, e->features);
  examples_.push_back(e);
}

void ExampleDb::append_recorded(const ExampleRef& e, FeatureInterner interner) {
  if (interner.total_examples() != examples_.size() + 1)
    throw std::logic_error("interner statistics out of step with example store");
  interner_ = std::move(interner);
  examples_.push_back(e);
}

void ExampleDb::adopt_interner(FeatureInterner interner) {
  if (interner.total_examples() != examples_.size())
    throw std::logic_error("interner statistics out of step with example store");
  interner_ = std::move(interner);
}

ExampleDb ExampleDb::restore(FeatureInterner interner,
                             std::span<const ExampleRef> examples) {
  if (interner.total_examples() != examples.size())
    throw std::logic_error("interner statistics out of step with example store");
  ExampleDb db;
  db.interner_ = std::move(interner);
  for (const ExampleRef& e : examples) db.examples_.push_back(e);
  return db;
}

std::vector<ScoredExample> knn_exact(const ExampleDb& db, const FeatureVector& query,
                                     std::size_t k, SimilarityKind kind) {
  std::vector<ScoredExample> scored;
  scored.reserve(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    const ExampleRef& e = db.at(i);
    double s = kind == SimilarityKind::kPlain
                   ? jaccard(query, e->features)
                   : weighted_jaccard(db.interner(), query, e->features);
    scored.push_back(ScoredExample{e, s});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredExample& x, const ScoredExample& y) {
                     if (x.score != y.score) return x.score > y.score;
                     return x.example->seq > y.example->seq;
                   });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

namespace {

template <typename Range, typename GetTactic>
std::vector<std::uint64_t> dedup_tactics(const Range& neighbors, GetTactic tactic) {
  std::vector<std::uint64_t> out;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& n : neighbors)
    if (seen.insert(tactic(n)).second) out.push_back(tactic(n));
  return out;
}

}  // namespace

std::vector<std::uint64_t> rank_tactics(std::span<const ScoredExample> neighbors) {
  return dedup_tactics(neighbors,
                       [](const ScoredExample& s) { return s.example->tactic; });
}

std::vector<std::uint64_t> rank_tactics(std::span<const ExampleRef> neighbors) {
  return dedup_tactics(neighbors, [](const ExampleRef& e) { return e->tactic; });
}

}  // namespace tacpred
