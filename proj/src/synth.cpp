#include "tacpred/synth.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "tacpred/hash.hpp"
#include "tacpred/rng.hpp"

namespace tacpred {

namespace {

std::vector<std::uint32_t> sample_distinct(SplitRng& rng, std::size_t count,
                                           std::size_t universe) {
  std::set<std::uint32_t> picked;
  while (picked.size() < count)
    picked.insert(static_cast<std::uint32_t>(rng.below(universe)));
  return {picked.begin(), picked.end()};
}

FeatureVector to_fv(const std::vector<std::uint32_t>& ids) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  entries.reserve(ids.size());
  for (std::uint32_t id : ids) entries.emplace_back(id, 1u);
  return FeatureVector::from_entries(std::move(entries));
}

std::vector<std::uint32_t> swap_features(std::vector<std::uint32_t> ids,
                                         std::size_t swaps, std::size_t universe,
                                         SplitRng& rng) {
  std::set<std::uint32_t> current(ids.begin(), ids.end());
  for (std::size_t s = 0; s < swaps && !current.empty(); ++s) {
    auto it = current.begin();
    std::advance(it, rng.below(current.size()));
    current.erase(it);
    for (int attempt = 0; attempt < 32; ++attempt) {
      auto candidate = static_cast<std::uint32_t>(rng.below(universe));
      if (current.insert(candidate).second) break;
    }
  }
  return {current.begin(), current.end()};
}

}  // namespace

FeatureInterner universe_interner(std::size_t universe) {
  FeatureInterner interner;
  for (std::size_t i = 0; i < universe; ++i)
    interner.intern("s:" + std::to_string(i), Origin::kGoal);
  return interner;
}

std::vector<ExampleRef> clustered_examples(const ClusteredParams& params) {
  SplitRng rng(params.seed);
  std::vector<std::vector<std::uint32_t>> archetypes;
  archetypes.reserve(params.n_clusters);
  for (std::size_t c = 0; c < params.n_clusters; ++c)
    archetypes.push_back(
        sample_distinct(rng, params.features_per_example, params.universe));

  std::vector<ExampleRef> out;
  out.reserve(params.n_examples);
  for (std::size_t i = 0; i < params.n_examples; ++i) {
    std::size_t c = rng.below(params.n_clusters);
    std::vector<std::uint32_t> ids =
        swap_features(archetypes[c], params.noise, params.universe, rng);
    std::uint64_t tactic = fnv1a64("cluster-" + std::to_string(c));
    out.push_back(make_example(to_fv(ids), tactic, i));
  }
  return out;
}

FeatureVector perturbed_query(const ExampleRef& e, std::size_t universe,
                              std::uint64_t seed) {
  SplitRng rng(seed);
  std::vector<std::uint32_t> ids;
  ids.reserve(e->features.distinct_count());
  for (const auto& [id, count] : e->features.entries()) {
    (void)count;
    ids.push_back(id);
  }
  return to_fv(swap_features(std::move(ids), 2, universe, rng));
}

std::vector<ExampleRef> separable_examples(std::uint64_t seed, std::size_t n_examples,
                                           std::size_t universe,
                                           std::size_t features_per_example) {
  SplitRng rng(seed);
  const std::uint64_t tactic_present = fnv1a64("label-present");
  const std::uint64_t tactic_absent = fnv1a64("label-absent");

  std::vector<ExampleRef> out;
  out.reserve(n_examples);
  for (std::size_t i = 0; i < n_examples; ++i) {
    bool with_marker = rng.below(2) == 0;
    // Background features never include the marker id 0.
    std::vector<std::uint32_t> ids;
    for (std::uint32_t id : sample_distinct(rng, features_per_example, universe - 1))
      ids.push_back(id + 1);
    if (with_marker) ids.insert(ids.begin(), 0);
    out.push_back(make_example(to_fv(ids), with_marker ? tactic_present : tactic_absent,
                               i));
  }
  return out;
}

std::vector<CorpusRecord> locality_records(const LocalityParams& params) {
  SplitRng rng(params.seed);
  std::vector<CorpusRecord> out;
  std::uint64_t seq = 0;

  for (std::size_t m = 0; m < params.n_modules; ++m) {
    std::string module = "Mod" + std::to_string(m);
    for (std::size_t c = 0; c < params.clusters_per_module; ++c) {
      std::string tactic =
          "tac_" + std::to_string(m) + "_" + std::to_string(c);
      std::vector<std::uint32_t> archetype =
          sample_distinct(rng, params.atoms_per_state, params.atom_universe);
      std::string head = "h" + std::to_string(m) + "_" + std::to_string(c);

      for (std::size_t k = 0; k < params.members_per_cluster; ++k) {
        std::vector<std::uint32_t> atoms =
            swap_features(archetype, 2, params.atom_universe, rng);
        std::vector<TermPtr> args;
        args.reserve(atoms.size());
        for (std::uint32_t a : atoms) args.push_back(make_atom("a" + std::to_string(a)));

        CorpusRecord rec;
        rec.state.goal = make_app(make_atom(head), std::move(args));
        if (rng.below(2) == 0) {
          std::vector<TermPtr> hyp_args;
          for (std::uint32_t a :
               sample_distinct(rng, 3, params.atom_universe))
            hyp_args.push_back(make_atom("a" + std::to_string(a)));
          rec.state.hypotheses.emplace_back(
              "H", make_app(make_atom("hyp_" + head), std::move(hyp_args)));
        }
        rec.tactic = tactic;
        rec.seq = seq++;
        rec.module_path = module;
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

}  // namespace tacpred
