#include <doctest.h>

#include <sstream>

#include "tacpred/snapshot.hpp"
#include "tacpred/synth.hpp"
#include "testutil.hpp"

using namespace tacpred;

namespace {

struct Trained {
  FeatureInterner interner;
  ExampleDb db;
  LshForest lshf;
  RandomForest rforest;

  explicit Trained(std::uint64_t seed)
      : lshf(LshForestParams{}, std::make_shared<MixBitHashFamily>(seed)),
        rforest(RandomForestParams{.n_max = 32, .seed = seed}) {
    db = ExampleDb(universe_interner(500));
    for (const ExampleRef& e : clustered_examples({.seed = seed, .n_examples = 250})) {
      db.insert(e);
      lshf.insert(e);
      rforest.insert(e);
    }
    interner = db.interner();
  }
};

}  // namespace

TEST_CASE("lshf snapshot round trip preserves predictions") {
  Trained t(61);
  std::stringstream buf;
  save_lshf(buf, FeatureConfig{}, t.lshf, t.interner);

  SavedModel loaded = load_model(buf);
  REQUIRE(loaded.kind == ModelKind::kLshf);
  REQUIRE(loaded.lshf.has_value());
  CHECK(loaded.lshf->size() == t.lshf.size());

  for (std::size_t probe = 0; probe < 20; ++probe) {
    FeatureVector q = perturbed_query(t.db.at(probe * 11), 500, probe);
    CHECK(loaded.lshf->predict(q, 10, true, loaded.interner) ==
          t.lshf.predict(q, 10, true, t.interner));
  }
}

TEST_CASE("rforest snapshot round trip preserves predictions and state") {
  Trained t(62);
  std::stringstream buf;
  save_rforest(buf, FeatureConfig{}, t.rforest, t.interner);

  SavedModel loaded = load_model(buf);
  REQUIRE(loaded.kind == ModelKind::kRForest);
  REQUIRE(loaded.rforest.has_value());
  CHECK(loaded.rforest->trees().size() == t.rforest.trees().size());
  CHECK(loaded.rforest->rng().state() == t.rforest.rng().state());

  for (std::size_t probe = 0; probe < 20; ++probe) {
    FeatureVector q = perturbed_query(t.db.at(probe * 7), 500, probe);
    CHECK(loaded.rforest->predict(q, 10) == t.rforest.predict(q, 10));
  }

  // The restored forest keeps evolving identically to the original.
  RandomForest original = t.rforest;
  RandomForest restored = *loaded.rforest;
  for (const ExampleRef& e : clustered_examples({.seed = 99, .n_examples = 50})) {
    original.insert(e);
    restored.insert(e);
  }
  FeatureVector q = perturbed_query(t.db.at(3), 500, 123);
  CHECK(original.predict(q, 10) == restored.predict(q, 10));
}

TEST_CASE("knn snapshot restores the example db") {
  Trained t(63);
  std::stringstream buf;
  save_knn(buf, FeatureConfig{}, t.db);

  SavedModel loaded = load_model(buf);
  REQUIRE(loaded.kind == ModelKind::kKnnExact);
  ExampleDb db = loaded.as_example_db();
  CHECK(db.size() == t.db.size());

  FeatureVector q = perturbed_query(t.db.at(5), 500, 5);
  auto before = knn_exact(t.db, q, 10, SimilarityKind::kTfIdfWeighted);
  auto after = knn_exact(db, q, 10, SimilarityKind::kTfIdfWeighted);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].example->seq == after[i].example->seq);
    CHECK(before[i].score == doctest::Approx(after[i].score));
  }
}

TEST_CASE("snapshots are byte-stable") {
  Trained t(64);
  std::stringstream a, b;
  save_rforest(a, FeatureConfig{}, t.rforest, t.interner);
  save_rforest(b, FeatureConfig{}, t.rforest, t.interner);
  CHECK(a.str() == b.str());

  std::stringstream c, d;
  save_lshf(c, FeatureConfig{}, t.lshf, t.interner);
  save_lshf(d, FeatureConfig{}, t.lshf, t.interner);
  CHECK(c.str() == d.str());
}

TEST_CASE("snapshot rejects corrupt input") {
  std::stringstream bad("not a snapshot at all");
  CHECK_THROWS_AS(load_model(bad), SnapshotError);

  Trained t(65);
  std::stringstream buf;
  save_lshf(buf, FeatureConfig{}, t.lshf, t.interner);
  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), SnapshotError);
}
