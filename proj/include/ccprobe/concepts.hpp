#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccprobe/bitvector.hpp"
#include "ccprobe/error.hpp"
#include "ccprobe/schema.hpp"
#include "ccprobe/state_table.hpp"

namespace ccprobe {

// ---------------------------------------------------------------------------
// Atomic concepts
// ---------------------------------------------------------------------------

/// lo/hi may be infinite for one-sided ranges such as "x <= -0.4".
struct Interval {
  double lo;
  double hi;
  bool lo_inclusive = false;
  bool hi_inclusive = false;

  bool contains(double v) const noexcept {
    const bool above = lo_inclusive ? v >= lo : v > lo;
    const bool below = hi_inclusive ? v <= hi : v < hi;
    return above && below;
  }
  bool operator==(const Interval&) const = default;
};

struct Equals {
  double value;
  bool operator==(const Equals&) const = default;
};

struct IsTrue {
  bool operator==(const IsTrue&) const = default;
};

using Predicate = std::variant<Interval, Equals, IsTrue>;

struct AtomicConcept {
  std::string id;
  std::size_t dim = 0;
  Predicate predicate;
  std::string description;

  bool holds(double value) const noexcept;
  bool operator==(const AtomicConcept&) const = default;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class FormulaKind { leaf, negation, conjunction, disjunction };

/// Immutable binary boolean AST over atom ids. Copies share structure.
class Formula {
 public:
  /// Placeholder: a leaf with an empty atom id.
  Formula();
  static Formula leaf(std::string atom_id);
  static Formula negation(Formula child);
  static Formula conjunction(Formula left, Formula right);
  static Formula disjunction(Formula left, Formula right);

  FormulaKind kind() const noexcept { return node_->kind; }
  const std::string& atom_id() const;  // leaf only
  const Formula& child() const;        // negation only
  const Formula& left() const;         // conjunction/disjunction only
  const Formula& right() const;

  /// Number of leaf occurrences; negation is free.
  std::size_t leaf_count() const noexcept { return node_->leaves; }

  /// Structural equality.
  bool operator==(const Formula& other) const;

 private:
  struct Node {
    FormulaKind kind;
    std::string atom_id;
    std::vector<Formula> children;
    std::size_t leaves;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline std::size_t leaf_count(const Formula& f) { return f.leaf_count(); }

/// Fully parenthesized rendering: "P21", "(NOT RLeg)", "((X1 OR X2) AND Vy1)".
std::string print_formula(const Formula& f);

/// Distinct atom ids referenced by `f`, in first-occurrence order.
std::vector<std::string> formula_atoms(const Formula& f);

class ConceptLibrary;

/// Raised for malformed formula text; `position()` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position) : Error(ErrorKind::data, what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Grammar: expr := term { OR term }; term := factor { AND factor };
/// factor := NOT factor | '(' expr ')' | atom-id. Binary chains nest to the left.
Formula parse_formula(std::string_view text, const ConceptLibrary& library);
/// Same grammar; any identifier is accepted as an atom id.
Formula parse_formula(std::string_view text);

// ---------------------------------------------------------------------------
// Library
// ---------------------------------------------------------------------------

class ConceptLibrary {
 public:
  ConceptLibrary() = default;
  ConceptLibrary(std::string name, StateSchema schema, std::vector<AtomicConcept> atoms);

  const std::string& name() const noexcept { return name_; }
  const StateSchema& schema() const noexcept { return schema_; }
  const std::vector<AtomicConcept>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  std::optional<std::size_t> find(std::string_view id) const;
  const AtomicConcept& atom(std::string_view id) const;  // throws on unknown id

 private:
  std::string name_;
  StateSchema schema_;
  std::vector<AtomicConcept> atoms_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

ConceptLibrary parse_concept_library(std::string_view json_text);
ConceptLibrary load_concept_library(const std::string& path);
/// Canonical JSON text of the library; stable across load/save.
std::string save_concept_library(const ConceptLibrary& library);

/// Built-in libraries: "lunarlander" and "blackjack".
std::vector<std::string> builtin_library_names();
ConceptLibrary builtin_library(std::string_view name);
/// Accepts "builtin:<name>" or a file path.
ConceptLibrary resolve_library(const std::string& source);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

using AtomBits = std::map<std::string, BitVector, std::less<>>;

BitVector eval_atom(const AtomicConcept& atom, const StateTable& states);
/// Throws when `states` does not carry the library's dimension names and kinds.
void check_schema_compatible(const ConceptLibrary& library, const StateSchema& schema);
/// All library atoms over `states`, in library order.
std::vector<BitVector> eval_atoms(const ConceptLibrary& library, const StateTable& states);
AtomBits atom_bits_by_id(const ConceptLibrary& library, const std::vector<BitVector>& bits);

BitVector eval_formula(const Formula& f, const AtomBits& atom_bits);

}  // namespace ccprobe
