#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "tacpred/eval.hpp"
#include "tacpred/hash.hpp"
#include "tacpred/rng.hpp"

namespace tacpred {

namespace {

// Draws up to `want` elements without replacement (partial Fisher-Yates).
std::vector<std::uint64_t> sample_without_replacement(std::vector<std::uint64_t> pool,
                                                      std::size_t want, SplitRng& rng) {
  std::size_t take = std::min(want, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

void write_row(std::ostream& out, int label, std::uint64_t seq,
               const std::map<std::uint32_t, std::uint64_t>& state_buckets,
               std::size_t tactic_index) {
  out << label << " qid:" << seq;
  for (const auto& [index, value] : state_buckets) out << ' ' << index << ':' << value;
  out << ' ' << tactic_index << ":1\n";
}

std::vector<ScoredExample> knn_over(const FeatureInterner& interner,
                                    const std::deque<ExampleRef>& pool,
                                    const FeatureVector& query, std::size_t k,
                                    SimilarityKind kind) {
  std::vector<ScoredExample> scored;
  scored.reserve(pool.size());
  for (const ExampleRef& e : pool) {
    double s = kind == SimilarityKind::kPlain
                   ? jaccard(query, e->features)
                   : weighted_jaccard(interner, query, e->features);
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

}  // namespace

ExportStats export_binary_dataset(const std::vector<CorpusRecord>& corpus,
                                  const FeatureConfig& cfg, const ExportParams& params,
                                  std::ostream& out) {
  if (params.ratio == 0) throw std::invalid_argument("ratio must be positive");
  if (params.buckets == 0) throw std::invalid_argument("buckets must be positive");

  SplitRng rng(params.seed);
  FeatureInterner interner;
  std::deque<ExampleRef> pool;  // previous records, windowed in strong mode

  // Tactic universe for random negatives, in sorted order for determinism.
  std::vector<std::uint64_t> all_tactics;
  {
    std::set<std::uint64_t> seen;
    for (const CorpusRecord& rec : corpus) seen.insert(fnv1a64(rec.tactic));
    all_tactics.assign(seen.begin(), seen.end());
  }

  ExportStats stats;
  auto buckets = static_cast<std::uint32_t>(params.buckets);

  for (const CorpusRecord& rec : corpus) {
    FeatureVector fv = featurize_state(rec.state, cfg, interner);
    std::uint64_t truth = fnv1a64(rec.tactic);

    std::map<std::uint32_t, std::uint64_t> state_buckets;
    for (const auto& [id, count] : fv.entries()) state_buckets[id % buckets] += count;

    auto tactic_index = [&](std::uint64_t tactic) {
      return params.buckets + static_cast<std::size_t>(tactic % buckets);
    };

    write_row(out, 1, rec.seq, state_buckets, tactic_index(truth));
    ++stats.positives;

    std::vector<std::uint64_t> candidates;
    if (params.mode == NegativeMode::kStrong) {
      std::vector<ScoredExample> neighbors =
          knn_over(interner, pool, fv, 100, params.kind);
      for (std::uint64_t t : rank_tactics(std::span<const ScoredExample>(neighbors)))
        if (t != truth) candidates.push_back(t);
    } else {
      for (std::uint64_t t : all_tactics)
        if (t != truth) candidates.push_back(t);
    }

    std::vector<std::uint64_t> negatives =
        sample_without_replacement(std::move(candidates), params.ratio, rng);
    for (std::uint64_t t : negatives) write_row(out, 0, rec.seq, state_buckets, tactic_index(t));
    stats.negatives += negatives.size();
    if (negatives.size() < params.ratio) ++stats.insufficient;

    record_example(interner, fv);
    pool.push_back(make_example(std::move(fv), truth, rec.seq));
    if (params.window != 0 && pool.size() > params.window) pool.pop_front();
  }
  return stats;
}

}  // namespace tacpred
