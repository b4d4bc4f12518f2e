#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tacpred/eval.hpp"
#include "tacpred/hash.hpp"
#include "tacpred/snapshot.hpp"
#include "tacpred/synth.hpp"

namespace {

using namespace tacpred;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct ModelOptions {
  std::string kind = "lshf";
  std::size_t n_tries = 11;
  std::size_t max_depth = 20;
  std::size_t n_max = 320;
  double impurity = 0.5;
  std::size_t leaf_cap = 0;
  std::size_t k = 10;
  bool no_resort = false;
  std::uint64_t seed = 42;
};

void add_model_flags(CLI::App* cmd, ModelOptions& opt, bool with_kind) {
  if (with_kind)
    cmd->add_option("--model", opt.kind, "Model kind: knn-exact, lshf or rforest")
        ->check(CLI::IsMember({"knn-exact", "lshf", "rforest"}));
  cmd->add_option("--tries", opt.n_tries, "LSHF: number of tries")->capture_default_str();
  cmd->add_option("--max-depth", opt.max_depth, "LSHF: trie depth cap")
      ->capture_default_str();
  cmd->add_option("--n-max", opt.n_max, "RF: maximum number of trees")
      ->capture_default_str();
  cmd->add_option("--impurity", opt.impurity, "RF: impurity threshold for splits")
      ->capture_default_str();
  cmd->add_option("--leaf-cap", opt.leaf_cap,
                  "RF: soft cap on leaf size, 0 = unbounded");
  cmd->add_option("-k,--top-k", opt.k, "Prediction list length")->capture_default_str();
  cmd->add_flag("--no-resort", opt.no_resort,
                "LSHF: skip re-sorting candidates by weighted Jaccard");
  cmd->add_option("--seed", opt.seed, "Deterministic seed")
      ->envname("TACPRED_SEED")
      ->capture_default_str();
}

std::unique_ptr<OnlineModel> make_model(const std::string& kind, const ModelOptions& opt) {
  if (kind == "knn-exact") return std::make_unique<KnnExactModel>();
  if (kind == "lshf")
    return std::make_unique<LshfModel>(LshForestParams{opt.n_tries, opt.max_depth},
                                       opt.seed, !opt.no_resort);
  if (kind == "rforest")
    return std::make_unique<RForestModel>(
        RandomForestParams{opt.n_max, opt.impurity, opt.seed, opt.leaf_cap});
  throw CLI::ValidationError("--model", "unknown model '" + kind + "'");
}

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RecordError(0, "cannot open corpus file '" + path + "'");
  try {
    return parse_dataset(in);
  } catch (const RecordError& e) {
    throw RecordError(e.line(), path + ": " + e.what());
  }
}

ProofState read_state_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw RecordError(1, "no proof state on standard input");
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("goal") || !j["goal"].is_string())
    throw RecordError(1, "expected a JSON object with a 'goal' term");
  ProofState state;
  state.goal = parse_term(j["goal"].get<std::string>());
  if (j.contains("hyps"))
    for (const auto& h : j["hyps"]) {
      if (!h.is_array() || h.size() != 2 || !h[0].is_string() || !h[1].is_string())
        throw RecordError(1, "each hypothesis must be a [name, term] pair");
      state.hypotheses.emplace_back(h[0].get<std::string>(),
                                    parse_term(h[1].get<std::string>()));
    }
  return state;
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xf]; }

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = hex_digit(static_cast<unsigned>(v));
  return s;
}

int cmd_featurize(const std::string& corpus_path, const std::string& features,
                  const std::string& out_path) {
  FeatureConfig cfg = FeatureConfig::from_string(features);
  std::vector<CorpusRecord> corpus = read_corpus(corpus_path);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw RecordError(0, "cannot open '" + out_path + "' for writing");
    out = &file;
  }

  FeatureInterner interner;
  for (const CorpusRecord& rec : corpus) {
    FeatureVector fv = featurize_state(rec.state, cfg, interner);
    nlohmann::json j;
    j["seq"] = rec.seq;
    nlohmann::json feats = nlohmann::json::object();
    for (const auto& [id, count] : fv.entries()) feats[std::to_string(id)] = count;
    j["features"] = std::move(feats);
    j["tactic_hash"] = hex64(fnv1a64(rec.tactic));
    *out << j.dump() << '\n';
    record_example(interner, fv);
  }
  return 0;
}

struct Trainer {
  FeatureConfig cfg;
  ModelOptions opt;
  ModelKind kind = ModelKind::kLshf;
  FeatureInterner interner;
  ExampleDb knn_db;
  std::optional<LshForest> lshf;
  std::optional<RandomForest> rforest;

  explicit Trainer(const FeatureConfig& config, const ModelOptions& options)
      : cfg(config), opt(options) {
    if (opt.kind == "knn-exact") {
      kind = ModelKind::kKnnExact;
    } else if (opt.kind == "lshf") {
      kind = ModelKind::kLshf;
      lshf.emplace(LshForestParams{opt.n_tries, opt.max_depth},
                   std::make_shared<MixBitHashFamily>(opt.seed));
    } else {
      kind = ModelKind::kRForest;
      rforest.emplace(RandomForestParams{opt.n_max, opt.impurity, opt.seed, opt.leaf_cap});
    }
  }

  void feed(const CorpusRecord& rec) {
    FeatureVector fv = featurize_state(rec.state, cfg, interner);
    record_example(interner, fv);
    ExampleRef e = make_example(std::move(fv), fnv1a64(rec.tactic), rec.seq);
    if (kind == ModelKind::kKnnExact)
      knn_db.append_recorded(e, interner);
    else if (kind == ModelKind::kLshf)
      lshf->insert(e);
    else
      rforest->insert(e);
  }

  void save(const std::string& path) const {
    save_model_file(path, kind, cfg, interner, &knn_db,
                    lshf ? &*lshf : nullptr, rforest ? &*rforest : nullptr);
  }
};

int cmd_train(const std::string& corpus_path, const std::string& features,
              const ModelOptions& opt, const std::string& out_path,
              std::size_t checkpoint_every) {
  Trainer trainer(FeatureConfig::from_string(features), opt);
  std::vector<CorpusRecord> corpus = read_corpus(corpus_path);

  std::size_t fed = 0;
  std::size_t checkpoint = 0;
  for (const CorpusRecord& rec : corpus) {
    trainer.feed(rec);
    ++fed;
    if (checkpoint_every != 0 && fed % checkpoint_every == 0)
      trainer.save(out_path + "." + std::to_string(checkpoint++));
  }
  trainer.save(out_path);
  std::cerr << "trained " << trainer.opt.kind << " on " << fed << " records -> "
            << out_path << '\n';
  return 0;
}

int cmd_predict(const std::string& snapshot_path, std::size_t k, bool no_resort) {
  SavedModel model = load_model_file(snapshot_path);
  ProofState state = read_state_line(std::cin);

  FeatureInterner interner = model.interner;
  FeatureVector fv = featurize_state(state, model.cfg, interner);

  std::vector<std::uint64_t> tactics;
  switch (model.kind) {
    case ModelKind::kKnnExact: {
      ExampleDb db = model.as_example_db();
      std::vector<ScoredExample> neighbors =
          knn_exact(db, fv, std::max<std::size_t>(k, 100), SimilarityKind::kTfIdfWeighted);
      tactics = rank_tactics(std::span<const ScoredExample>(neighbors));
      if (tactics.size() > k) tactics.resize(k);
      break;
    }
    case ModelKind::kLshf:
      tactics = model.lshf->predict(fv, k, !no_resort, interner);
      break;
    case ModelKind::kRForest:
      tactics = model.rforest->predict(fv, k);
      break;
  }
  for (std::uint64_t t : tactics) std::cout << hex64(t) << '\n';
  return 0;
}

int cmd_eval(bool chrono, const std::string& corpus_path, const std::string& features,
             std::vector<std::string> kinds, const ModelOptions& opt,
             const std::vector<std::string>& test_modules, double test_frac,
             const std::string& csv_path) {
  FeatureConfig cfg = FeatureConfig::from_string(features);
  std::vector<CorpusRecord> corpus = read_corpus(corpus_path);

  if (kinds.empty()) kinds = {"lshf", "rforest"};
  std::vector<std::unique_ptr<OnlineModel>> models;
  for (const std::string& kind : kinds) models.push_back(make_model(kind, opt));

  EvalReport report;
  if (chrono) {
    report = chrono_eval(corpus, cfg, models);
  } else {
    SplitSpec spec;
    spec.test_modules.insert(test_modules.begin(), test_modules.end());
    spec.test_fraction = test_frac;
    report = split_eval(corpus, spec, cfg, models);
  }

  std::cout << report_to_json(report).dump(2) << '\n';
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw RecordError(0, "cannot open '" + csv_path + "' for writing");
    write_cases_csv(csv, report);
  }
  return 0;
}

int cmd_export(const std::string& corpus_path, const std::string& features,
               const ExportParams& params, const std::string& out_path) {
  FeatureConfig cfg = FeatureConfig::from_string(features);
  std::vector<CorpusRecord> corpus = read_corpus(corpus_path);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw RecordError(0, "cannot open '" + out_path + "' for writing");
    out = &file;
  }
  ExportStats stats = export_binary_dataset(corpus, cfg, params, *out);
  std::cerr << "rows: " << stats.positives << " positive, " << stats.negatives
            << " negative; " << stats.insufficient
            << " records short of the requested ratio\n";
  return 0;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  auto idx = static_cast<std::size_t>(p * static_cast<double>(values.size() - 1));
  return values[idx];
}

double mean_range(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += v[i];
  return sum / static_cast<double>(hi - lo);
}

long peak_rss_kb() {
  struct rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

int cmd_bench(std::size_t n, const std::string& which, const ModelOptions& opt) {
  using clock = std::chrono::steady_clock;

  ClusteredParams params;
  params.seed = opt.seed;
  params.n_examples = n;
  params.universe = 2000;
  params.n_clusters = 200;
  params.features_per_example = 30;
  std::vector<ExampleRef> corpus = clustered_examples(params);
  FeatureInterner interner = universe_interner(params.universe);

  std::vector<std::string> kinds;
  if (which == "both") {
    kinds = {"lshf", "rforest"};
  } else {
    kinds = {which};
  }

  for (const std::string& kind : kinds) {
    std::unique_ptr<OnlineModel> model = make_model(kind, opt);

    std::vector<double> insert_us;
    insert_us.reserve(corpus.size());
    for (const ExampleRef& e : corpus) {
      record_example(interner, e->features);
      auto start = clock::now();
      model->insert(interner, e);
      auto stop = clock::now();
      insert_us.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
    }

    std::vector<double> query_ms;
    std::size_t n_queries = std::min<std::size_t>(200, corpus.size());
    for (std::size_t q = 0; q < n_queries; ++q) {
      FeatureVector fv = perturbed_query(corpus[(q * 37) % corpus.size()],
                                         params.universe, opt.seed + q);
      auto start = clock::now();
      volatile std::size_t sink = model->predict(interner, fv, opt.k).size();
      auto stop = clock::now();
      (void)sink;
      query_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }

    std::size_t head = std::min<std::size_t>(1000, insert_us.size());
    double first_mean = mean_range(insert_us, 0, head);
    double last_mean = mean_range(insert_us, insert_us.size() - head, insert_us.size());

    std::printf("%s: insert p50 %.1f us, p90 %.1f us, p99 %.1f us\n", kind.c_str(),
                percentile(insert_us, 0.5), percentile(insert_us, 0.9),
                percentile(insert_us, 0.99));
    std::printf("%s: insert mean first-%zu %.1f us, last-%zu %.1f us, ratio %.2f\n",
                kind.c_str(), head, first_mean, head, last_mean,
                last_mean / std::max(first_mean, 1e-9));
    std::printf("%s: query p50 %.2f ms, p90 %.2f ms, p99 %.2f ms\n", kind.c_str(),
                percentile(query_ms, 0.5), percentile(query_ms, 0.9),
                percentile(query_ms, 0.99));
  }
  std::printf("peak resident memory: %.1f MB\n",
              static_cast<double>(peak_rss_kb()) / 1024.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online tactic prediction over term-structured proof states"};
  app.require_subcommand(1);

  std::string corpus_path, out_path, csv_path, snapshot_path;
  std::string features = "OWVTSC";
  ModelOptions opt;
  std::size_t checkpoint_every = 0;
  std::vector<std::string> eval_models;
  std::vector<std::string> test_modules;
  double test_frac = 0.0;
  ExportParams export_params;
  std::string export_mode = "strong";
  std::size_t bench_n = 10000;
  std::string bench_model = "both";

  auto add_features_flag = [&](CLI::App* cmd) {
    cmd->add_option("--features", features,
                    "Feature classes: O(riginal) W(alks) V(ertical) T(structure) "
                    "S(eparate spaces) C(ounts)")
        ->capture_default_str();
  };

  CLI::App* featurize = app.add_subcommand("featurize", "Print feature vectors as JSON lines");
  featurize->add_option("corpus", corpus_path, "JSON-lines corpus")->required();
  add_features_flag(featurize);
  featurize->add_option("-o,--out", out_path, "Output path (default stdout)");

  CLI::App* train = app.add_subcommand("train", "Stream a corpus into a model snapshot");
  train->add_option("corpus", corpus_path, "JSON-lines corpus")->required();
  add_features_flag(train);
  add_model_flags(train, opt, true);
  train->add_option("-o,--out", out_path, "Snapshot path")->required();
  train->add_option("--checkpoint-every", checkpoint_every,
                    "Also write a numbered snapshot every N records");

  CLI::App* predict = app.add_subcommand(
      "predict", "Read one proof state from stdin, print ranked tactic hashes");
  predict->add_option("--snapshot", snapshot_path, "Model snapshot")->required();
  predict->add_option("-k,--top-k", opt.k, "Prediction list length")->capture_default_str();
  predict->add_flag("--no-resort", opt.no_resort, "LSHF: skip weighted-Jaccard resort");

  CLI::App* eval_chrono =
      app.add_subcommand("eval-chrono", "Chronological evaluation; JSON report to stdout");
  eval_chrono->add_option("corpus", corpus_path, "JSON-lines corpus")->required();
  add_features_flag(eval_chrono);
  eval_chrono->add_option("--model", eval_models, "Model kind (repeatable)")
      ->check(CLI::IsMember({"knn-exact", "lshf", "rforest"}));
  add_model_flags(eval_chrono, opt, false);
  eval_chrono->add_option("--csv", csv_path, "Write per-case ranks as CSV");

  CLI::App* eval_split =
      app.add_subcommand("eval-split", "Held-out module evaluation; JSON report to stdout");
  eval_split->add_option("corpus", corpus_path, "JSON-lines corpus")->required();
  add_features_flag(eval_split);
  eval_split->add_option("--model", eval_models, "Model kind (repeatable)")
      ->check(CLI::IsMember({"knn-exact", "lshf", "rforest"}));
  add_model_flags(eval_split, opt, false);
  eval_split->add_option("--test-module", test_modules,
                         "Module path held out for testing (repeatable)");
  eval_split->add_option("--test-frac", test_frac,
                         "Alternatively hold out the last fraction of each module");
  eval_split->add_option("--csv", csv_path, "Write per-case ranks as CSV");

  CLI::App* export_cmd =
      app.add_subcommand("export-xgb", "Export sparse binary training rows");
  export_cmd->add_option("corpus", corpus_path, "JSON-lines corpus")->required();
  add_features_flag(export_cmd);
  export_cmd->add_option("--ratio", export_params.ratio, "Negatives per record")
      ->capture_default_str();
  export_cmd->add_option("--mode", export_mode, "Negative sampling: strong or random")
      ->check(CLI::IsMember({"strong", "random"}))
      ->capture_default_str();
  export_cmd->add_option("--buckets", export_params.buckets, "Feature buckets per block")
      ->capture_default_str();
  export_cmd->add_option("--window", export_params.window,
                         "Strong mode: k-NN pool of the last N records (0 = all)");
  export_cmd->add_option("--seed", export_params.seed, "Sampling seed")
      ->envname("TACPRED_SEED");
  export_cmd->add_option("-o,--out", out_path, "Output path (default stdout)");

  CLI::App* bench = app.add_subcommand("bench", "Insert/query latency and memory report");
  bench->add_option("-n,--examples", bench_n, "Synthetic corpus size")->capture_default_str();
  bench->add_option("--model", bench_model, "lshf, rforest or both")
      ->check(CLI::IsMember({"lshf", "rforest", "both"}))
      ->capture_default_str();
  add_model_flags(bench, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (featurize->parsed()) return cmd_featurize(corpus_path, features, out_path);
    if (train->parsed())
      return cmd_train(corpus_path, features, opt, out_path, checkpoint_every);
    if (predict->parsed()) return cmd_predict(snapshot_path, opt.k, opt.no_resort);
    if (eval_chrono->parsed())
      return cmd_eval(true, corpus_path, features, eval_models, opt, {}, 0.0, csv_path);
    if (eval_split->parsed())
      return cmd_eval(false, corpus_path, features, eval_models, opt, test_modules,
                      test_frac, csv_path);
    if (export_cmd->parsed()) {
      export_params.mode =
          export_mode == "strong" ? NegativeMode::kStrong : NegativeMode::kRandom;
      return cmd_export(corpus_path, features, export_params, out_path);
    }
    if (bench->parsed()) return cmd_bench(bench_n, bench_model, opt);
  } catch (const RecordError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const SnapshotError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
