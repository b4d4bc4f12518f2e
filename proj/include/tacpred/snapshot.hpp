#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacpred/eval.hpp"
#include "tacpred/lshf.hpp"
#include "tacpred/rforest.hpp"
#include "tacpred/similarity.hpp"

namespace tacpred {

class SnapshotError : public std::runtime_error {
 public:
  explicit SnapshotError(const std::string& what) : std::runtime_error(what) {}
};

enum class ModelKind : std::uint8_t { kKnnExact = 0, kLshf = 1, kRForest = 2 };

/// A model restored from disk. Reloading reproduces bit-identical
/// predictions: the LSH forest is rebuilt by replaying its deterministic
/// inserts, the random forest's trees and generator state are stored
/// explicitly.
struct SavedModel {
  ModelKind kind = ModelKind::kKnnExact;
  FeatureConfig cfg;
  FeatureInterner interner;
  std::vector<ExampleRef> examples;  // insertion order
  std::optional<LshForest> lshf;
  std::optional<RandomForest> rforest;

  ExampleDb as_example_db() const;
};

void save_knn(std::ostream& out, const FeatureConfig& cfg, const ExampleDb& db);
void save_lshf(std::ostream& out, const FeatureConfig& cfg, const LshForest& forest,
               const FeatureInterner& interner);
void save_rforest(std::ostream& out, const FeatureConfig& cfg,
                  const RandomForest& forest, const FeatureInterner& interner);

SavedModel load_model(std::istream& in);

void save_model_file(const std::string& path, ModelKind kind, const FeatureConfig& cfg,
                     const FeatureInterner& interner, const ExampleDb* knn_db,
                     const LshForest* lshf, const RandomForest* rforest);
SavedModel load_model_file(const std::string& path);

}  // namespace tacpred
