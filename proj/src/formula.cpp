#include <cctype>
#include <set>

#include "ccprobe/concepts.hpp"

namespace ccprobe {

Formula::Formula() : Formula(leaf({})) {}

Formula Formula::leaf(std::string atom_id) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::leaf, std::move(atom_id), {}, 1}));
}

Formula Formula::negation(Formula child) {
  const std::size_t leaves = child.leaf_count();
  return Formula(std::make_shared<const Node>(Node{FormulaKind::negation, {}, {std::move(child)}, leaves}));
}

Formula Formula::conjunction(Formula left, Formula right) {
  const std::size_t leaves = left.leaf_count() + right.leaf_count();
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::conjunction, {}, {std::move(left), std::move(right)}, leaves}));
}

Formula Formula::disjunction(Formula left, Formula right) {
  const std::size_t leaves = left.leaf_count() + right.leaf_count();
  return Formula(
      std::make_shared<const Node>(Node{FormulaKind::disjunction, {}, {std::move(left), std::move(right)}, leaves}));
}

const std::string& Formula::atom_id() const {
  if (kind() != FormulaKind::leaf) throw std::logic_error("atom_id() on a non-leaf formula");
  return node_->atom_id;
}

const Formula& Formula::child() const {
  if (kind() != FormulaKind::negation) throw std::logic_error("child() on a non-negation formula");
  return node_->children[0];
}

const Formula& Formula::left() const {
  if (kind() != FormulaKind::conjunction && kind() != FormulaKind::disjunction)
    throw std::logic_error("left() on a non-binary formula");
  return node_->children[0];
}

const Formula& Formula::right() const {
  if (kind() != FormulaKind::conjunction && kind() != FormulaKind::disjunction)
    throw std::logic_error("right() on a non-binary formula");
  return node_->children[1];
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind() || leaf_count() != other.leaf_count()) return false;
  switch (kind()) {
    case FormulaKind::leaf: return atom_id() == other.atom_id();
    case FormulaKind::negation: return child() == other.child();
    default: return left() == other.left() && right() == other.right();
  }
}

namespace {

void print_into(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::leaf: out += f.atom_id(); return;
    case FormulaKind::negation:
      out += "(NOT ";
      print_into(f.child(), out);
      out += ')';
      return;
    case FormulaKind::conjunction:
    case FormulaKind::disjunction:
      out += '(';
      print_into(f.left(), out);
      out += f.kind() == FormulaKind::conjunction ? " AND " : " OR ";
      print_into(f.right(), out);
      out += ')';
      return;
  }
}

void collect_atoms(const Formula& f, std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (f.kind()) {
    case FormulaKind::leaf:
      if (seen.insert(f.atom_id()).second) out.push_back(f.atom_id());
      return;
    case FormulaKind::negation: collect_atoms(f.child(), out, seen); return;
    default:
      collect_atoms(f.left(), out, seen);
      collect_atoms(f.right(), out, seen);
  }
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

std::vector<std::string> formula_atoms(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_atoms(f, out, seen);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { ident, kw_and, kw_or, kw_not, lparen, rparen, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      toks.push_back({Tok::lparen, "(", i++});
    } else if (c == ')') {
      toks.push_back({Tok::rparen, ")", i++});
    } else if (ident_start(c)) {
      const std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      Tok kind = Tok::ident;
      if (word == "AND") kind = Tok::kw_and;
      else if (word == "OR") kind = Tok::kw_or;
      else if (word == "NOT") kind = Tok::kw_not;
      toks.push_back({kind, std::move(word), start});
    } else {
      throw ParseError("unexpected character '" + std::string(1, c) + "' at position " + std::to_string(i), i);
    }
  }
  toks.push_back({Tok::end, "", text.size()});
  return toks;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ConceptLibrary* library) : toks_(std::move(toks)), library_(library) {}

  Formula parse() {
    Formula f = expr();
    if (peek().kind != Tok::end) fail("AND, OR or end of input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError("syntax error at position " + std::to_string(t.pos) + ": expected " + expected + ", found " + found,
                     t.pos);
  }

  Formula expr() {
    Formula f = term();
    while (peek().kind == Tok::kw_or) {
      ++pos_;
      f = Formula::disjunction(std::move(f), term());
    }
    return f;
  }

  Formula term() {
    Formula f = factor();
    while (peek().kind == Tok::kw_and) {
      ++pos_;
      f = Formula::conjunction(std::move(f), factor());
    }
    return f;
  }

  Formula factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kw_not: ++pos_; return Formula::negation(factor());
      case Tok::lparen: {
        ++pos_;
        Formula f = expr();
        if (peek().kind != Tok::rparen) fail("')'");
        ++pos_;
        return f;
      }
      case Tok::ident:
        if (library_ && !library_->find(t.text))
          throw ParseError("unknown atom '" + t.text + "' at position " + std::to_string(t.pos), t.pos);
        ++pos_;
        return Formula::leaf(t.text);
      default: fail("atom id, NOT or '('");
    }
  }

  std::vector<Token> toks_;
  const ConceptLibrary* library_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const ConceptLibrary& library) {
  return Parser(tokenize(text), &library).parse();
}

Formula parse_formula(std::string_view text) { return Parser(tokenize(text), nullptr).parse(); }

}  // namespace ccprobe
