#include "tacpred/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "tacpred/hash.hpp"

namespace tacpred {

namespace {

constexpr std::size_t kTopK = 10;
constexpr std::size_t kKnnNeighbors = 100;

std::size_t rank_of(const std::vector<std::uint64_t>& predictions, std::uint64_t truth) {
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truth) return i + 1;
  return 0;
}

struct CaseTable {
  std::vector<std::uint64_t> seqs;
  std::vector<std::string> modules;
  std::vector<std::vector<std::size_t>> ranks_per_model;  // [model][case]
};

EvalReport build_report(std::span<const std::unique_ptr<OnlineModel>> models,
                        CaseTable table) {
  EvalReport report;
  report.case_seqs = std::move(table.seqs);
  report.case_modules = std::move(table.modules);
  std::size_t n = report.case_seqs.size();

  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelReport mr;
    mr.model = models[m]->name();
    mr.ranks = std::move(table.ranks_per_model[m]);
    mr.n_cases = n;

    std::size_t hit1 = 0, hit10 = 0;
    std::map<std::string, std::array<std::size_t, 3>> by_module;  // n, hit1, hit10
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = mr.ranks[i];
      bool h1 = r == 1, h10 = r != 0 && r <= kTopK;
      hit1 += h1;
      hit10 += h10;
      auto& row = by_module[report.case_modules[i]];
      ++row[0];
      row[1] += h1;
      row[2] += h10;
    }
    mr.top1 = n ? static_cast<double>(hit1) / static_cast<double>(n) : 0.0;
    mr.top10 = n ? static_cast<double>(hit10) / static_cast<double>(n) : 0.0;
    for (const auto& [module, row] : by_module)
      mr.per_module[module] =
          ModuleStats{static_cast<double>(row[1]) / static_cast<double>(row[0]),
                      static_cast<double>(row[2]) / static_cast<double>(row[0]), row[0]};
    report.models.push_back(std::move(mr));
  }

  for (std::size_t a = 0; a < report.models.size(); ++a) {
    for (std::size_t b = a + 1; b < report.models.size(); ++b) {
      std::vector<bool> sa(n), sb(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t ra = report.models[a].ranks[i], rb = report.models[b].ranks[i];
        sa[i] = ra != 0 && ra <= kTopK;
        sb[i] = rb != 0 && rb <= kTopK;
      }
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) hits += (sa[i] || sb[i]);
      report.unions.push_back(PairUnion{
          report.models[a].model, report.models[b].model,
          n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0});
    }
  }
  return report;
}

}  // namespace

double topk_accuracy(std::span<const std::vector<std::uint64_t>> predictions,
                     std::span<const std::uint64_t> truths, std::size_t k) {
  if (predictions.size() != truths.size()) throw LengthMismatchError();
  if (predictions.empty()) throw EmptyEvaluationError();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    std::size_t r = rank_of(predictions[i], truths[i]);
    hits += r != 0 && r <= k;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double union_metric(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw LengthMismatchError();
  if (a.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hits += (a[i] || b[i]);
  return static_cast<double>(hits) / static_cast<double>(a.size());
}

void KnnExactModel::insert(const FeatureInterner& interner, const ExampleRef& e) {
  db_.append_recorded(e, interner);
}

std::vector<std::uint64_t> KnnExactModel::predict(const FeatureInterner& interner,
                                                  const FeatureVector& f,
                                                  std::size_t k) const {
  (void)interner;  // db_ tracks the interner version from the last insert
  std::vector<ScoredExample> neighbors =
      knn_exact(db_, f, std::max(k, kKnnNeighbors), kind_);
  std::vector<std::uint64_t> tactics =
      rank_tactics(std::span<const ScoredExample>(neighbors));
  if (tactics.size() > k) tactics.resize(k);
  return tactics;
}

void LshfModel::insert(const FeatureInterner& interner, const ExampleRef& e) {
  (void)interner;
  forest_.insert(e);
}

std::vector<std::uint64_t> LshfModel::predict(const FeatureInterner& interner,
                                              const FeatureVector& f,
                                              std::size_t k) const {
  return forest_.predict(f, k, resort_, interner);
}

void RForestModel::insert(const FeatureInterner& interner, const ExampleRef& e) {
  (void)interner;
  forest_.insert(e);
}

std::vector<std::uint64_t> RForestModel::predict(const FeatureInterner& interner,
                                                 const FeatureVector& f,
                                                 std::size_t k) const {
  (void)interner;
  return forest_.predict(f, k);
}

EvalReport split_eval(const std::vector<CorpusRecord>& corpus, const SplitSpec& spec,
                      const FeatureConfig& cfg,
                      std::span<const std::unique_ptr<OnlineModel>> models) {
  std::vector<bool> is_test(corpus.size(), false);
  if (!spec.test_modules.empty()) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      is_test[i] = spec.test_modules.count(corpus[i].module_path) != 0;
  } else if (spec.test_fraction > 0.0) {
    std::map<std::string, std::vector<std::size_t>> by_module;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      by_module[corpus[i].module_path].push_back(i);
    for (const auto& [module, idx] : by_module) {
      (void)module;
      auto held = static_cast<std::size_t>(
          std::ceil(spec.test_fraction * static_cast<double>(idx.size())));
      for (std::size_t j = idx.size() - held; j < idx.size(); ++j) is_test[idx[j]] = true;
    }
  }
  std::size_t n_test = static_cast<std::size_t>(
      std::count(is_test.begin(), is_test.end(), true));
  if (n_test == 0 || n_test == corpus.size()) throw EmptyTestSetError();

  FeatureInterner interner;

  // Train pass, corpus order.
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (is_test[i]) continue;
    FeatureVector fv = featurize_state(corpus[i].state, cfg, interner);
    record_example(interner, fv);
    ExampleRef e = make_example(std::move(fv), fnv1a64(corpus[i].tactic), corpus[i].seq);
    for (const auto& model : models) model->insert(interner, e);
  }

  // Test pass.
  CaseTable table;
  table.ranks_per_model.resize(models.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!is_test[i]) continue;
    FeatureVector fv = featurize_state(corpus[i].state, cfg, interner);
    std::uint64_t truth = fnv1a64(corpus[i].tactic);
    table.seqs.push_back(corpus[i].seq);
    table.modules.push_back(corpus[i].module_path);
    for (std::size_t m = 0; m < models.size(); ++m)
      table.ranks_per_model[m].push_back(
          rank_of(models[m]->predict(interner, fv, kTopK), truth));
  }
  return build_report(models, std::move(table));
}

EvalReport chrono_eval(const std::vector<CorpusRecord>& corpus, const FeatureConfig& cfg,
                       std::span<const std::unique_ptr<OnlineModel>> models) {
  for (std::size_t i = 1; i < corpus.size(); ++i)
    if (corpus[i].seq <= corpus[i - 1].seq)
      throw std::invalid_argument("chronological evaluation needs records sorted by seq");

  FeatureInterner interner;
  CaseTable table;
  table.ranks_per_model.resize(models.size());

  for (const CorpusRecord& rec : corpus) {
    FeatureVector fv = featurize_state(rec.state, cfg, interner);
    std::uint64_t truth = fnv1a64(rec.tactic);
    table.seqs.push_back(rec.seq);
    table.modules.push_back(rec.module_path);
    for (std::size_t m = 0; m < models.size(); ++m)
      table.ranks_per_model[m].push_back(
          rank_of(models[m]->predict(interner, fv, kTopK), truth));

    record_example(interner, fv);
    ExampleRef e = make_example(std::move(fv), truth, rec.seq);
    for (const auto& model : models) model->insert(interner, e);
  }
  return build_report(models, std::move(table));
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["n_cases"] = report.case_seqs.size();
  j["models"] = nlohmann::json::array();
  for (const ModelReport& m : report.models) {
    nlohmann::json jm;
    jm["model"] = m.model;
    jm["top1"] = m.top1;
    jm["top10"] = m.top10;
    jm["n_cases"] = m.n_cases;
    if (!m.per_module.empty()) {
      nlohmann::json mods = nlohmann::json::object();
      for (const auto& [module, stats] : m.per_module)
        mods[module] = {{"top1", stats.top1},
                        {"top10", stats.top10},
                        {"n_cases", stats.n_cases}};
      jm["per_module"] = std::move(mods);
    }
    j["models"].push_back(std::move(jm));
  }
  j["unions"] = nlohmann::json::array();
  for (const PairUnion& u : report.unions)
    j["unions"].push_back(
        {{"model_a", u.model_a}, {"model_b", u.model_b}, {"union_top10", u.union_top10}});
  return j;
}

void write_cases_csv(std::ostream& out, const EvalReport& report) {
  out << "seq,model,rank_of_truth\n";
  for (const ModelReport& m : report.models)
    for (std::size_t i = 0; i < m.ranks.size(); ++i)
      out << report.case_seqs[i] << ',' << m.model << ',' << m.ranks[i] << '\n';
}

}  // namespace tacpred
