#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tacpred/persist.hpp"
#include "tacpred/term.hpp"

namespace tacpred {

/// Which side of the proof state a feature came from. Only meaningful when
/// origin separation is enabled; merged feature spaces tag everything kGoal.
enum class Origin : std::uint8_t { kGoal = 0, kHypothesis = 1 };

struct FeatureKey {
  std::string text;
  Origin origin = Origin::kGoal;

  bool operator==(const FeatureKey& o) const {
    return origin == o.origin && text == o.text;
  }
};

/// Sparse multiset of interned feature ids with occurrence counts.
/// Entries are sorted by id and counts are >= 1.
class FeatureVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;

 public:
  FeatureVector() = default;

  /// Builds from (id, count) pairs in any order; duplicate ids are summed and
  /// zero counts rejected.
  static FeatureVector from_entries(std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& entries() const {
    return entries_;
  }
  std::size_t distinct_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::uint32_t id) const;
  std::uint32_t count(std::uint32_t id) const;

  bool operator==(const FeatureVector& o) const { return entries_ == o.entries_; }
};

class UnknownFeatureIdError : public std::logic_error {
 public:
  explicit UnknownFeatureIdError(std::uint32_t id)
      : std::logic_error("unknown feature id " + std::to_string(id)) {}
};

/// Bijective feature-string+origin <-> id table plus the per-feature document
/// frequencies used by TfIdf weighting.
///
/// A persistent value: copying an interner snapshots it, and mutating one
/// copy never disturbs another. Internally the id-indexed tables are chunked
/// copy-on-write, and the string index is shared by all versions (it is
/// append-only; a binding is visible to a version only when that version's
/// own key table confirms it). One logical writer advances a version; any
/// number of threads may read any version.
class FeatureInterner {
  struct Index {
    std::mutex mutex;
    std::unordered_multimap<std::string, std::uint32_t> by_text;
  };

  CowVec<FeatureKey> keys_;
  CowVec<std::uint32_t> doc_count_;
  std::uint64_t total_examples_ = 0;
  std::shared_ptr<Index> index_;

 public:
  FeatureInterner() : index_(std::make_shared<Index>()) {}

  /// Returns the id for the key, issuing a fresh one on first sight.
  /// Ids are dense, start at 0, and are never reassigned.
  std::uint32_t intern(std::string_view text, Origin origin);

  std::optional<std::uint32_t> find(std::string_view text, Origin origin) const;

  const FeatureKey& key(std::uint32_t id) const;
  std::uint32_t size() const { return static_cast<std::uint32_t>(keys_.size()); }

  std::uint64_t total_examples() const { return total_examples_; }
  std::uint32_t doc_count(std::uint32_t id) const;

  /// Rebuilds an interner from snapshot data: keys interned in id order with
  /// the given document counts.
  static FeatureInterner restore(const std::vector<FeatureKey>& keys,
                                 const std::vector<std::uint32_t>& doc_counts,
                                 std::uint64_t total_examples);

  friend void record_example(FeatureInterner& interner, const FeatureVector& fv);
};

/// Bumps the database statistics for one stored example: total_examples by
/// one, and the document count of each distinct feature id by one
/// (presence, not occurrence count).
void record_example(FeatureInterner& interner, const FeatureVector& fv);

/// Feature-class switches. At least one of original/walks/vertical/structure
/// must be enabled.
struct FeatureConfig {
  bool original = true;         // identifiers and identifier pairs
  bool walks = true;            // top-down walks of up to 3 nodes with roles
  bool vertical = true;         // abstracted root-to-atom paths
  bool structure = true;        // depth-2 shape skeleton
  bool separate_origins = true; // hypothesis vs goal feature spaces
  bool use_counts = true;       // occurrence counts (otherwise clamped to 1)

  void validate() const;

  /// Parses a compact class string such as "OWVTSC" (any order,
  /// case-insensitive); each letter enables one class.
  static FeatureConfig from_string(std::string_view spec);
  std::string to_string() const;
};

/// Feature-string extractors over one term. Multisets are returned as
/// vectors with repeats.
std::vector<std::string> extract_original(const Term& t);
std::vector<std::string> extract_walks(const Term& t);
std::vector<std::string> extract_vertical(const Term& t);
std::string extract_structure(const Term& t);

/// Featurizes a proof state under the config: the union of the enabled
/// classes over the goal and every hypothesis type. New feature keys are
/// interned into `interner` (document counts are not bumped here; see
/// record_example). Copy the interner first if the previous version must
/// stay reachable.
FeatureVector featurize_state(const ProofState& state, const FeatureConfig& cfg,
                              FeatureInterner& interner);

}  // namespace tacpred
