#include "tacpred/term.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <unordered_set>

namespace tacpred {

namespace {

const char* code_name(SyntaxCode c) {
  switch (c) {
    case SyntaxCode::kEmptyInput: return "EmptyInput";
    case SyntaxCode::kEmptyApplication: return "EmptyApplication";
    case SyntaxCode::kUnbalanced: return "Unbalanced";
    case SyntaxCode::kBadAtom: return "BadAtom";
    case SyntaxCode::kTrailingInput: return "TrailingInput";
  }
  return "SyntaxError";
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_atom_char(char c) { return !is_space(c) && c != '(' && c != ')'; }

class Parser {
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  [[noreturn]] void fail(SyntaxCode code, const std::string& reason) const {
    throw SyntaxError(code, pos_, reason);
  }

  TermPtr atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_atom_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail(SyntaxCode::kBadAtom, "expected atom");
    return make_atom(std::string(text_.substr(start, pos_ - start)));
  }

  TermPtr term() {
    skip_space();
    if (pos_ >= text_.size()) fail(SyntaxCode::kUnbalanced, "unexpected end of input");
    if (text_[pos_] == ')') fail(SyntaxCode::kUnbalanced, "unexpected ')'");
    if (text_[pos_] != '(') return atom();

    ++pos_;  // '('
    TermPtr head = term();
    std::vector<TermPtr> args;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail(SyntaxCode::kUnbalanced, "missing ')'");
      if (text_[pos_] == ')') break;
      args.push_back(term());
    }
    if (args.empty())
      fail(SyntaxCode::kEmptyApplication, "application needs at least one argument");
    ++pos_;  // ')'
    return make_app(std::move(head), std::move(args));
  }

 public:
  explicit Parser(std::string_view text) : text_(text) {}

  TermPtr parse() {
    skip_space();
    if (pos_ >= text_.size()) fail(SyntaxCode::kEmptyInput, "empty input");
    TermPtr t = term();
    skip_space();
    if (pos_ < text_.size()) fail(SyntaxCode::kTrailingInput, "trailing input after term");
    return t;
  }
};

void print_into(const Term& t, std::string& out) {
  if (t.is_atom()) {
    out += t.atom;
    return;
  }
  out += '(';
  print_into(*t.head, out);
  for (const auto& a : t.args) {
    out += ' ';
    print_into(*a, out);
  }
  out += ')';
}

}  // namespace

SyntaxError::SyntaxError(SyntaxCode code, std::size_t position, const std::string& reason)
    : std::runtime_error(std::string(code_name(code)) + " at position " +
                         std::to_string(position) + ": " + reason),
      code_(code),
      position_(position) {}

RecordError::RecordError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}

TermPtr make_atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("atom name must be nonempty");
  for (char c : name)
    if (!is_atom_char(c))
      throw std::invalid_argument("atom name contains whitespace or parenthesis");
  auto t = std::make_shared<Term>();
  t->atom = std::move(name);
  return t;
}

TermPtr make_app(TermPtr head, std::vector<TermPtr> args) {
  if (!head) throw std::invalid_argument("application head must be set");
  if (args.empty()) throw std::invalid_argument("application needs at least one argument");
  auto t = std::make_shared<Term>();
  t->head = std::move(head);
  t->args = std::move(args);
  return t;
}

bool term_equal(const Term& a, const Term& b) {
  if (a.is_atom() != b.is_atom()) return false;
  if (a.is_atom()) return a.atom == b.atom;
  if (a.args.size() != b.args.size()) return false;
  if (!term_equal(*a.head, *b.head)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!term_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

TermPtr parse_term(std::string_view text) { return Parser(text).parse(); }

std::string print_term(const Term& t) {
  std::string out;
  print_into(t, out);
  return out;
}

std::vector<CorpusRecord> parse_dataset(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool explicit_seq = false;
  bool have_prev_seq = false;
  std::uint64_t prev_seq = 0;

  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (!is_space(c)) {
        blank = false;
        break;
      }
    if (blank) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw RecordError(line_no, "not a JSON object");

    CorpusRecord rec;
    try {
      if (!j.contains("goal") || !j["goal"].is_string())
        throw RecordError(line_no, "missing string key 'goal'");
      if (!j.contains("tactic") || !j["tactic"].is_string())
        throw RecordError(line_no, "missing string key 'tactic'");
      rec.tactic = j["tactic"].get<std::string>();
      if (rec.tactic.empty()) throw RecordError(line_no, "tactic must be nonempty");

      rec.state.goal = parse_term(j["goal"].get<std::string>());

      if (j.contains("hyps")) {
        if (!j["hyps"].is_array()) throw RecordError(line_no, "'hyps' must be an array");
        std::unordered_set<std::string> names;
        for (const auto& h : j["hyps"]) {
          if (!h.is_array() || h.size() != 2 || !h[0].is_string() || !h[1].is_string())
            throw RecordError(line_no, "each hypothesis must be a [name, term] pair");
          std::string name = h[0].get<std::string>();
          if (!names.insert(name).second)
            throw RecordError(line_no, "duplicate hypothesis name '" + name + "'");
          rec.state.hypotheses.emplace_back(std::move(name),
                                            parse_term(h[1].get<std::string>()));
        }
      }

      if (j.contains("module")) {
        if (!j["module"].is_string()) throw RecordError(line_no, "'module' must be a string");
        rec.module_path = j["module"].get<std::string>();
      }

      if (j.contains("seq")) {
        if (!j["seq"].is_number_unsigned())
          throw RecordError(line_no, "'seq' must be a non-negative integer");
        if (!records.empty() && !explicit_seq)
          throw RecordError(line_no, "mixed explicit and assigned 'seq' values");
        explicit_seq = true;
        rec.seq = j["seq"].get<std::uint64_t>();
        if (have_prev_seq && rec.seq <= prev_seq)
          throw RecordError(line_no, "'seq' values must be strictly increasing");
      } else {
        if (explicit_seq)
          throw RecordError(line_no, "mixed explicit and assigned 'seq' values");
        rec.seq = records.size();
      }
    } catch (const SyntaxError& e) {
      throw RecordError(line_no, std::string("bad term: ") + e.what());
    }

    prev_seq = rec.seq;
    have_prev_seq = true;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace tacpred
