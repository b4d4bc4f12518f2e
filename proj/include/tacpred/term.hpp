#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tacpred {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Rooted ordered tree over identifiers: either an atom or an application
/// with at least one argument. Shared immutable nodes, so subterms may be
/// reused freely.
struct Term {
  std::string atom;           // set iff this node is an atom
  TermPtr head;               // set iff this node is an application
  std::vector<TermPtr> args;  // nonempty iff application

  bool is_atom() const { return head == nullptr; }
};

TermPtr make_atom(std::string name);
TermPtr make_app(TermPtr head, std::vector<TermPtr> args);

bool term_equal(const Term& a, const Term& b);

/// One step of an interactive proof: named hypothesis types plus a goal.
struct ProofState {
  std::vector<std::pair<std::string, TermPtr>> hypotheses;
  TermPtr goal;
};

/// A proof state paired with the tactic that advanced it, in corpus order.
struct CorpusRecord {
  ProofState state;
  std::string tactic;
  std::uint64_t seq = 0;
  std::string module_path;
};

enum class SyntaxCode {
  kEmptyInput,
  kEmptyApplication,
  kUnbalanced,
  kBadAtom,
  kTrailingInput,
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SyntaxCode code, std::size_t position, const std::string& reason);
  SyntaxCode code() const { return code_; }
  std::size_t position() const { return position_; }

 private:
  SyntaxCode code_;
  std::size_t position_;
};

class RecordError : public std::runtime_error {
 public:
  RecordError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses the s-expression grammar: `atom` or `(head child1 ... childN)`,
/// N >= 1, atoms free of whitespace and parentheses. Total over the grammar;
/// throws SyntaxError otherwise.
TermPtr parse_term(std::string_view text);

/// Canonical printer; parse_term(print_term(t)) reproduces t.
std::string print_term(const Term& t);

/// Reads a JSON-lines corpus: one object per line with keys `hyps`
/// ([[name, term], ...]), `goal`, `tactic`, optional `seq` and `module`.
/// Blank lines are skipped. Fails fast: the first malformed record throws
/// RecordError and no partial corpus is returned. When `seq` is absent it is
/// assigned 0,1,2,... in read order; explicit values must be strictly
/// increasing and must not be mixed with absent ones.
std::vector<CorpusRecord> parse_dataset(std::istream& in);

}  // namespace tacpred
