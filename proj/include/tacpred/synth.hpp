#pragma once

#include <cstdint>
#include <vector>

#include "tacpred/example.hpp"
#include "tacpred/term.hpp"

namespace tacpred {

/// Interner preloaded with `universe` synthetic feature keys; key i interns
/// to id i. Document counts start at zero.
FeatureInterner universe_interner(std::size_t universe);

struct ClusteredParams {
  std::uint64_t seed = 0;
  std::size_t n_examples = 1000;
  std::size_t universe = 500;
  std::size_t n_clusters = 25;
  std::size_t features_per_example = 30;
  std::size_t noise = 4;  // features swapped per member
};

/// Id-space corpus of clustered examples: each cluster has an archetype
/// feature set and its own tactic; members perturb the archetype by `noise`
/// feature swaps. seq runs 0..n-1 in generation order (clusters shuffled
/// together).
std::vector<ExampleRef> clustered_examples(const ClusteredParams& params);

/// A nearby query for an existing example: the example's features with a
/// couple of random swaps.
FeatureVector perturbed_query(const ExampleRef& e, std::size_t universe,
                              std::uint64_t seed);

/// Two-label corpus where the label is a function of one feature's presence:
/// examples containing feature 0 carry tactic A, the rest tactic B. The
/// remaining features are random.
std::vector<ExampleRef> separable_examples(std::uint64_t seed, std::size_t n_examples,
                                           std::size_t universe,
                                           std::size_t features_per_example);

struct LocalityParams {
  std::uint64_t seed = 0;
  std::size_t n_modules = 8;
  std::size_t clusters_per_module = 6;
  std::size_t members_per_cluster = 24;
  std::size_t atoms_per_state = 12;
  std::size_t atom_universe = 400;
};

/// Term-level corpus exhibiting locality of proof similarity: each cluster
/// of near-duplicate states is contiguous in seq and carries a cluster-local
/// tactic; module paths group clusters so a module split can hold out whole
/// modules.
std::vector<CorpusRecord> locality_records(const LocalityParams& params);

}  // namespace tacpred
