#include "tacpred/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace tacpred {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint8_t get_u8(std::istream& in) {
  int c = in.get();
  if (c == EOF) throw SnapshotError("truncated snapshot");
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
  char b[4];
  if (!in.read(b, 4)) throw SnapshotError("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  char b[8];
  if (!in.read(b, 8)) throw SnapshotError("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string get_str(std::istream& in) {
  std::uint32_t n = get_u32(in);
  std::string s(n, '\0');
  if (n != 0 && !in.read(s.data(), n)) throw SnapshotError("truncated snapshot");
  return s;
}

void put_config(std::ostream& out, const FeatureConfig& cfg) {
  put_str(out, cfg.to_string());
}

FeatureConfig get_config(std::istream& in) {
  return FeatureConfig::from_string(get_str(in));
}

void put_interner(std::ostream& out, const FeatureInterner& interner) {
  put_u32(out, interner.size());
  for (std::uint32_t id = 0; id < interner.size(); ++id) {
    const FeatureKey& k = interner.key(id);
    put_u8(out, static_cast<std::uint8_t>(k.origin));
    put_str(out, k.text);
  }
  for (std::uint32_t id = 0; id < interner.size(); ++id)
    put_u32(out, interner.doc_count(id));
  put_u64(out, interner.total_examples());
}

FeatureInterner get_interner(std::istream& in) {
  std::uint32_t n = get_u32(in);
  std::vector<FeatureKey> keys;
  keys.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto origin = static_cast<Origin>(get_u8(in));
    keys.push_back(FeatureKey{get_str(in), origin});
  }
  std::vector<std::uint32_t> docs(n);
  for (std::uint32_t i = 0; i < n; ++i) docs[i] = get_u32(in);
  std::uint64_t total = get_u64(in);
  return FeatureInterner::restore(keys, docs, total);
}

void put_examples(std::ostream& out, const CowVec<ExampleRef>& store) {
  put_u64(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const StoredExample& e = *store[i];
    put_u64(out, e.seq);
    put_u64(out, e.tactic);
    put_u32(out, static_cast<std::uint32_t>(e.features.entries().size()));
    for (const auto& [id, count] : e.features.entries()) {
      put_u32(out, id);
      put_u32(out, count);
    }
  }
}

std::vector<ExampleRef> get_examples(std::istream& in) {
  std::uint64_t n = get_u64(in);
  std::vector<ExampleRef> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t seq = get_u64(in);
    std::uint64_t tactic = get_u64(in);
    std::uint32_t entries = get_u32(in);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(entries);
    for (std::uint32_t j = 0; j < entries; ++j) {
      std::uint32_t id = get_u32(in);
      std::uint32_t count = get_u32(in);
      pairs.emplace_back(id, count);
    }
    out.push_back(make_example(FeatureVector::from_entries(std::move(pairs)), tactic, seq));
  }
  return out;
}

void put_header(std::ostream& out, ModelKind kind, const FeatureConfig& cfg) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(kind));
  put_config(out, cfg);
}

using rf_detail::Tree;
using rf_detail::TreePtr;

void put_tree(std::ostream& out, const Tree& t,
              const std::unordered_map<const StoredExample*, std::uint32_t>& index_of) {
  if (t.leaf()) {
    put_u8(out, 0);
    put_u64(out, t.label);
    put_u32(out, static_cast<std::uint32_t>(t.examples.size()));
    for (const ExampleRef& e : t.examples) put_u32(out, index_of.at(e.get()));
    return;
  }
  put_u8(out, 1);
  put_u32(out, t.rule.feature);
  put_tree(out, *t.left, index_of);
  put_tree(out, *t.right, index_of);
}

TreePtr get_tree(std::istream& in, const std::vector<ExampleRef>& examples) {
  std::uint8_t tag = get_u8(in);
  if (tag == 0) {
    std::uint64_t label = get_u64(in);
    std::uint32_t n = get_u32(in);
    std::vector<ExampleRef> refs;
    refs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t idx = get_u32(in);
      if (idx >= examples.size()) throw SnapshotError("leaf references unknown example");
      refs.push_back(examples[idx]);
    }
    return rf_detail::make_leaf_tree(label, PList<ExampleRef>::from_range(refs));
  }
  if (tag != 1) throw SnapshotError("corrupt tree encoding");
  std::uint32_t feature = get_u32(in);
  TreePtr left = get_tree(in, examples);
  TreePtr right = get_tree(in, examples);
  auto t = std::make_shared<Tree>();
  t->rule = SplitRule{feature};
  t->left = std::move(left);
  t->right = std::move(right);
  return t;
}

}  // namespace

ExampleDb SavedModel::as_example_db() const {
  return ExampleDb::restore(interner, examples);
}

void save_knn(std::ostream& out, const FeatureConfig& cfg, const ExampleDb& db) {
  put_header(out, ModelKind::kKnnExact, cfg);
  put_interner(out, db.interner());
  put_u64(out, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    const StoredExample& e = *db.at(i);
    put_u64(out, e.seq);
    put_u64(out, e.tactic);
    put_u32(out, static_cast<std::uint32_t>(e.features.entries().size()));
    for (const auto& [id, count] : e.features.entries()) {
      put_u32(out, id);
      put_u32(out, count);
    }
  }
}

void save_lshf(std::ostream& out, const FeatureConfig& cfg, const LshForest& forest,
               const FeatureInterner& interner) {
  put_header(out, ModelKind::kLshf, cfg);
  put_interner(out, interner);
  put_examples(out, forest.store());
  put_u64(out, forest.family().seed());
  put_u32(out, static_cast<std::uint32_t>(forest.n_tries()));
  put_u32(out, static_cast<std::uint32_t>(forest.max_depth()));
}

void save_rforest(std::ostream& out, const FeatureConfig& cfg,
                  const RandomForest& forest, const FeatureInterner& interner) {
  put_header(out, ModelKind::kRForest, cfg);
  put_interner(out, interner);
  put_examples(out, forest.store());
  const RandomForestParams& p = forest.params();
  put_u32(out, static_cast<std::uint32_t>(p.n_max));
  put_f64(out, p.impurity_threshold);
  put_u32(out, static_cast<std::uint32_t>(p.leaf_cap));
  put_u64(out, p.seed);
  put_u64(out, forest.rng().state());

  std::unordered_map<const StoredExample*, std::uint32_t> index_of;
  for (std::size_t i = 0; i < forest.store().size(); ++i)
    index_of[forest.store()[i].get()] = static_cast<std::uint32_t>(i);

  put_u32(out, static_cast<std::uint32_t>(forest.trees().size()));
  for (const TreePtr& t : forest.trees()) put_tree(out, *t, index_of);
}

SavedModel load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw SnapshotError("not a model snapshot (bad magic)");
  std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));

  SavedModel model;
  model.kind = static_cast<ModelKind>(get_u8(in));
  model.cfg = get_config(in);
  model.interner = get_interner(in);

  switch (model.kind) {
    case ModelKind::kKnnExact: {
      model.examples = get_examples(in);
      break;
    }
    case ModelKind::kLshf: {
      model.examples = get_examples(in);
      std::uint64_t seed = get_u64(in);
      std::uint32_t n_tries = get_u32(in);
      std::uint32_t max_depth = get_u32(in);
      LshForest forest(LshForestParams{n_tries, max_depth},
                       std::make_shared<MixBitHashFamily>(seed));
      for (const ExampleRef& e : model.examples) forest.insert(e);
      model.lshf.emplace(std::move(forest));
      break;
    }
    case ModelKind::kRForest: {
      model.examples = get_examples(in);
      RandomForestParams params;
      params.n_max = get_u32(in);
      params.impurity_threshold = get_f64(in);
      params.leaf_cap = get_u32(in);
      params.seed = get_u64(in);
      SplitRng rng = SplitRng::from_state(get_u64(in));
      std::uint32_t n_trees = get_u32(in);
      std::vector<TreePtr> trees;
      trees.reserve(n_trees);
      for (std::uint32_t i = 0; i < n_trees; ++i)
        trees.push_back(get_tree(in, model.examples));
      CowVec<ExampleRef> store;
      for (const ExampleRef& e : model.examples) store.push_back(e);
      model.rforest.emplace(
          RandomForest::restore(params, rng, std::move(trees), std::move(store)));
      break;
    }
    default:
      throw SnapshotError("unknown model kind");
  }
  return model;
}

void save_model_file(const std::string& path, ModelKind kind, const FeatureConfig& cfg,
                     const FeatureInterner& interner, const ExampleDb* knn_db,
                     const LshForest* lshf, const RandomForest* rforest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open '" + path + "' for writing");
  switch (kind) {
    case ModelKind::kKnnExact:
      save_knn(out, cfg, *knn_db);
      break;
    case ModelKind::kLshf:
      save_lshf(out, cfg, *lshf, interner);
      break;
    case ModelKind::kRForest:
      save_rforest(out, cfg, *rforest, interner);
      break;
  }
  if (!out) throw SnapshotError("write to '" + path + "' failed");
}

SavedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace tacpred
