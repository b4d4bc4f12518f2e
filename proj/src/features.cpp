#include "tacpred/features.hpp"

#include <algorithm>
#include <cctype>

namespace tacpred {

namespace {

// Identifier-level view of a term: one node per identifier occurrence, with
// the arguments accumulated along the application spine as children. The
// head of `((f a) b)` is f with children [a, b].
struct IdentNode {
  const std::string* name;
  std::vector<IdentNode> children;

  bool leaf() const { return children.empty(); }
};

IdentNode ident_tree(const Term& t) {
  if (t.is_atom()) return IdentNode{&t.atom, {}};
  IdentNode n = ident_tree(*t.head);
  n.children.reserve(n.children.size() + t.args.size());
  for (const auto& a : t.args) n.children.push_back(ident_tree(*a));
  return n;
}

const char* role(const IdentNode& n) { return n.leaf() ? "AppArg" : "AppFun"; }

void original_walk(const IdentNode& n, std::vector<std::string>& out) {
  out.push_back(*n.name);
  for (const auto& c : n.children) {
    out.push_back(*n.name + "-" + *c.name);
    original_walk(c, out);
  }
}

std::string labelled(const IdentNode& n) { return *n.name + ":" + role(n); }

void walk_features(const IdentNode& n, std::vector<std::string>& out) {
  out.push_back(labelled(n));
  for (const auto& c : n.children) {
    out.push_back(labelled(n) + "(" + labelled(c) + ")");
    for (const auto& g : c.children)
      out.push_back(labelled(n) + "(" + labelled(c) + "(" + labelled(g) + "))");
    walk_features(c, out);
  }
}

void vertical_features(const IdentNode& n, std::size_t depth_from_root,
                       std::vector<std::string>& out) {
  if (n.leaf()) {
    std::string f = labelled(n);
    for (std::size_t i = 0; i < depth_from_root; ++i) f = "AppFun(" + f + ")";
    out.push_back(std::move(f));
    return;
  }
  for (const auto& c : n.children) vertical_features(c, depth_from_root + 1, out);
}

// Depth-2 shape: atoms become X, an application at depth 0 or 1 becomes
// Xk(...) with its arity k, and everything below depth 1 collapses into a
// single X per parent.
std::string structure_of(const IdentNode& n, int depth) {
  if (n.leaf()) return "X";
  std::string out = "X" + std::to_string(n.children.size()) + "(";
  if (depth >= 1) {
    out += "X";
  } else {
    bool first = true;
    for (const auto& c : n.children) {
      if (!first) out += ",";
      first = false;
      out += structure_of(c, depth + 1);
    }
  }
  out += ")";
  return out;
}

}  // namespace

FeatureVector FeatureVector::from_entries(
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries) {
  std::sort(entries.begin(), entries.end());
  FeatureVector fv;
  fv.entries_.reserve(entries.size());
  for (const auto& [id, count] : entries) {
    if (count == 0) throw std::invalid_argument("feature count must be positive");
    if (!fv.entries_.empty() && fv.entries_.back().first == id)
      fv.entries_.back().second += count;
    else
      fv.entries_.emplace_back(id, count);
  }
  return fv;
}

bool FeatureVector::contains(std::uint32_t id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(),
                             std::make_pair(id, std::uint32_t{0}));
  return it != entries_.end() && it->first == id;
}

std::uint32_t FeatureVector::count(std::uint32_t id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(),
                             std::make_pair(id, std::uint32_t{0}));
  return (it != entries_.end() && it->first == id) ? it->second : 0;
}

std::uint32_t FeatureInterner::intern(std::string_view text, Origin origin) {
  std::lock_guard<std::mutex> lock(index_->mutex);
  auto [lo, hi] = index_->by_text.equal_range(std::string(text));
  for (auto it = lo; it != hi; ++it) {
    std::uint32_t id = it->second;
    if (id < keys_.size() && keys_[id].origin == origin && keys_[id].text == text)
      return id;
  }
  auto id = static_cast<std::uint32_t>(keys_.size());
  keys_.push_back(FeatureKey{std::string(text), origin});
  doc_count_.push_back(0);
  index_->by_text.emplace(std::string(text), id);
  return id;
}

std::optional<std::uint32_t> FeatureInterner::find(std::string_view text,
                                                   Origin origin) const {
  std::lock_guard<std::mutex> lock(index_->mutex);
  auto [lo, hi] = index_->by_text.equal_range(std::string(text));
  for (auto it = lo; it != hi; ++it) {
    std::uint32_t id = it->second;
    if (id < keys_.size() && keys_[id].origin == origin && keys_[id].text == text)
      return id;
  }
  return std::nullopt;
}

const FeatureKey& FeatureInterner::key(std::uint32_t id) const {
  if (id >= keys_.size()) throw UnknownFeatureIdError(id);
  return keys_[id];
}

std::uint32_t FeatureInterner::doc_count(std::uint32_t id) const {
  if (id >= doc_count_.size()) throw UnknownFeatureIdError(id);
  return doc_count_[id];
}

FeatureInterner FeatureInterner::restore(const std::vector<FeatureKey>& keys,
                                         const std::vector<std::uint32_t>& doc_counts,
                                         std::uint64_t total_examples) {
  if (keys.size() != doc_counts.size())
    throw std::invalid_argument("key and document-count tables differ in length");
  FeatureInterner interner;
  for (const FeatureKey& k : keys) interner.intern(k.text, k.origin);
  for (std::size_t i = 0; i < doc_counts.size(); ++i)
    interner.doc_count_.set(i, doc_counts[i]);
  interner.total_examples_ = total_examples;
  return interner;
}

void record_example(FeatureInterner& interner, const FeatureVector& fv) {
  for (const auto& [id, count] : fv.entries()) {
    (void)count;
    if (id >= interner.keys_.size()) throw UnknownFeatureIdError(id);
  }
  for (const auto& [id, count] : fv.entries()) {
    (void)count;
    interner.doc_count_.set(id, interner.doc_count_[id] + 1);
  }
  ++interner.total_examples_;
}

void FeatureConfig::validate() const {
  if (!original && !walks && !vertical && !structure)
    throw std::invalid_argument("at least one feature class must be enabled");
}

FeatureConfig FeatureConfig::from_string(std::string_view spec) {
  FeatureConfig cfg;
  cfg.original = cfg.walks = cfg.vertical = cfg.structure = false;
  cfg.separate_origins = cfg.use_counts = false;
  for (char c : spec) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'O': cfg.original = true; break;
      case 'W': cfg.walks = true; break;
      case 'V': cfg.vertical = true; break;
      case 'T': cfg.structure = true; break;
      case 'S': cfg.separate_origins = true; break;
      case 'C': cfg.use_counts = true; break;
      default:
        throw std::invalid_argument(std::string("unknown feature class '") + c + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string FeatureConfig::to_string() const {
  std::string s;
  if (original) s += 'O';
  if (walks) s += 'W';
  if (vertical) s += 'V';
  if (structure) s += 'T';
  if (separate_origins) s += 'S';
  if (use_counts) s += 'C';
  return s;
}

std::vector<std::string> extract_original(const Term& t) {
  std::vector<std::string> out;
  original_walk(ident_tree(t), out);
  return out;
}

std::vector<std::string> extract_walks(const Term& t) {
  std::vector<std::string> out;
  walk_features(ident_tree(t), out);
  return out;
}

std::vector<std::string> extract_vertical(const Term& t) {
  std::vector<std::string> out;
  vertical_features(ident_tree(t), 0, out);
  return out;
}

std::string extract_structure(const Term& t) { return structure_of(ident_tree(t), 0); }

FeatureVector featurize_state(const ProofState& state, const FeatureConfig& cfg,
                              FeatureInterner& interner) {
  cfg.validate();

  // Accumulate (string, origin) multiset in first-encounter order so fresh
  // ids are issued deterministically.
  std::vector<std::pair<std::string, Origin>> order;
  std::unordered_map<std::string, std::uint32_t> counts[2];

  auto add = [&](std::string text, Origin origin) {
    if (!cfg.separate_origins) origin = Origin::kGoal;
    auto& bucket = counts[static_cast<int>(origin)];
    auto [it, fresh] = bucket.emplace(std::move(text), 1u);
    if (fresh)
      order.emplace_back(it->first, origin);
    else
      ++it->second;
  };

  auto add_term = [&](const Term& t, Origin origin) {
    if (cfg.original)
      for (auto& f : extract_original(t)) add(std::move(f), origin);
    if (cfg.walks)
      for (auto& f : extract_walks(t)) add(std::move(f), origin);
    if (cfg.vertical)
      for (auto& f : extract_vertical(t)) add(std::move(f), origin);
    if (cfg.structure) add(extract_structure(t), origin);
  };

  add_term(*state.goal, Origin::kGoal);
  for (const auto& [name, type] : state.hypotheses) {
    (void)name;
    add_term(*type, Origin::kHypothesis);
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  entries.reserve(order.size());
  for (const auto& [text, origin] : order) {
    std::uint32_t n = counts[static_cast<int>(origin)].at(text);
    entries.emplace_back(interner.intern(text, origin), cfg.use_counts ? n : 1u);
  }
  return FeatureVector::from_entries(std::move(entries));
}

}  // namespace tacpred
