#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tacpred/example.hpp"
#include "tacpred/lshf.hpp"
#include "tacpred/rforest.hpp"
#include "tacpred/similarity.hpp"
#include "tacpred/term.hpp"

namespace tacpred {

class LengthMismatchError : public std::invalid_argument {
 public:
  LengthMismatchError() : std::invalid_argument("argument lengths differ") {}
};

class EmptyEvaluationError : public std::invalid_argument {
 public:
  EmptyEvaluationError() : std::invalid_argument("no cases to evaluate") {}
};

class EmptyTestSetError : public std::invalid_argument {
 public:
  EmptyTestSetError() : std::invalid_argument("split selects no test records") {}
};

/// Fraction of cases whose truth appears in the first k predictions.
double topk_accuracy(std::span<const std::vector<std::uint64_t>> predictions,
                     std::span<const std::uint64_t> truths, std::size_t k);

/// Fraction of cases where at least one of two models succeeded.
double union_metric(const std::vector<bool>& a, const std::vector<bool>& b);

/// An online predictor as seen by the evaluation harness: the harness owns
/// the canonical interner and the insert/predict interleaving; models only
/// ever see an example after predicting it.
class OnlineModel {
 public:
  virtual ~OnlineModel() = default;
  virtual std::string name() const = 0;
  virtual void insert(const FeatureInterner& interner, const ExampleRef& e) = 0;
  virtual std::vector<std::uint64_t> predict(const FeatureInterner& interner,
                                             const FeatureVector& f,
                                             std::size_t k) const = 0;
};

/// Brute-force k-NN predictor. Fetches up to 100 neighbors per query so the
/// deduplicated tactic list can fill the requested length.
class KnnExactModel final : public OnlineModel {
  ExampleDb db_;
  SimilarityKind kind_;

 public:
  explicit KnnExactModel(SimilarityKind kind = SimilarityKind::kTfIdfWeighted)
      : kind_(kind) {}
  std::string name() const override { return "knn-exact"; }
  void insert(const FeatureInterner& interner, const ExampleRef& e) override;
  std::vector<std::uint64_t> predict(const FeatureInterner& interner,
                                     const FeatureVector& f,
                                     std::size_t k) const override;
  const ExampleDb& db() const { return db_; }
};

class LshfModel final : public OnlineModel {
  LshForest forest_;
  bool resort_;

 public:
  LshfModel(LshForestParams params, std::uint64_t seed, bool resort = true)
      : forest_(params, std::make_shared<MixBitHashFamily>(seed)), resort_(resort) {}
  std::string name() const override { return "lshf"; }
  void insert(const FeatureInterner& interner, const ExampleRef& e) override;
  std::vector<std::uint64_t> predict(const FeatureInterner& interner,
                                     const FeatureVector& f,
                                     std::size_t k) const override;
  const LshForest& forest() const { return forest_; }
};

class RForestModel final : public OnlineModel {
  RandomForest forest_;

 public:
  explicit RForestModel(RandomForestParams params) : forest_(params) {}
  std::string name() const override { return "rforest"; }
  void insert(const FeatureInterner& interner, const ExampleRef& e) override;
  std::vector<std::uint64_t> predict(const FeatureInterner& interner,
                                     const FeatureVector& f,
                                     std::size_t k) const override;
  const RandomForest& forest() const { return forest_; }
};

struct ModuleStats {
  double top1 = 0.0;
  double top10 = 0.0;
  std::size_t n_cases = 0;
};

struct ModelReport {
  std::string model;
  double top1 = 0.0;
  double top10 = 0.0;
  std::size_t n_cases = 0;
  std::map<std::string, ModuleStats> per_module;
  std::vector<std::size_t> ranks;  // 1-based rank of the truth per case; 0 = absent
};

struct PairUnion {
  std::string model_a, model_b;
  double union_top10 = 0.0;
};

struct EvalReport {
  std::vector<ModelReport> models;
  std::vector<PairUnion> unions;
  std::vector<std::uint64_t> case_seqs;
  std::vector<std::string> case_modules;
};

/// Held-out test selection: either an explicit set of sink modules, or the
/// chronologically last `test_fraction` of each module. validation_fraction
/// is carried for parameter-tuning workflows; the harness itself trains on
/// every non-test record.
struct SplitSpec {
  std::set<std::string> test_modules;
  double test_fraction = 0.0;
  double validation_fraction = 0.0;
};

/// Trains every model on all non-test records in corpus order, then scores
/// every test record at k in {1, 10}.
EvalReport split_eval(const std::vector<CorpusRecord>& corpus, const SplitSpec& spec,
                      const FeatureConfig& cfg,
                      std::span<const std::unique_ptr<OnlineModel>> models);

/// Single chronological pass: each record is predicted by the model state
/// built from strictly earlier records, then inserted. Record 0 is scored
/// against the empty model.
EvalReport chrono_eval(const std::vector<CorpusRecord>& corpus, const FeatureConfig& cfg,
                       std::span<const std::unique_ptr<OnlineModel>> models);

nlohmann::json report_to_json(const EvalReport& report);
void write_cases_csv(std::ostream& out, const EvalReport& report);

enum class NegativeMode : std::uint8_t { kStrong = 0, kRandom = 1 };

struct ExportParams {
  std::size_t ratio = 8;
  NegativeMode mode = NegativeMode::kStrong;
  std::size_t buckets = 20000;
  std::uint64_t seed = 0;
  /// Strong mode: restrict the k-NN pool to the last `window` previous
  /// records (0 = all previous records).
  std::size_t window = 0;
  SimilarityKind kind = SimilarityKind::kTfIdfWeighted;
};

struct ExportStats {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Records that yielded fewer than `ratio` negative rows.
  std::size_t insufficient = 0;
};

/// Writes one positive and up to `ratio` negative sparse rows per record:
/// `label qid:<seq> <index>:<value> ...` with strictly increasing indices.
/// State features occupy bucket indices [0, buckets) via id mod buckets with
/// occurrence counts accumulated; the tactic occupies a disjoint second
/// block [buckets, 2*buckets). Strong negatives are sampled without
/// replacement from the top-100 k-NN tactic predictions over earlier
/// records; random negatives from all tactics seen in the corpus. The true
/// tactic is always excluded.
ExportStats export_binary_dataset(const std::vector<CorpusRecord>& corpus,
                                  const FeatureConfig& cfg, const ExportParams& params,
                                  std::ostream& out);

}  // namespace tacpred
