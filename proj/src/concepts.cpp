#include "ccprobe/concepts.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "builtin_libraries.hpp"

namespace ccprobe {

using nlohmann::json;

bool AtomicConcept::holds(double value) const noexcept {
  return std::visit(
      [value](const auto& p) -> bool {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Interval>)
          return p.contains(value);
        else if constexpr (std::is_same_v<P, Equals>)
          return value == p.value;
        else
          return value != 0.0;
      },
      predicate);
}

namespace {

bool valid_atom_id(const std::string& id) {
  if (id.empty() || !(std::isalpha(static_cast<unsigned char>(id[0])) || id[0] == '_')) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return id != "AND" && id != "OR" && id != "NOT";
}

void validate_atom(const AtomicConcept& a, const StateSchema& schema) {
  if (!valid_atom_id(a.id)) throw data_error("invalid atom id '" + a.id + "'");
  if (a.dim >= schema.size()) throw data_error("atom '" + a.id + "' refers to dimension " + std::to_string(a.dim) +
                                               " but the schema has " + std::to_string(schema.size()));
  const DimensionKind kind = schema[a.dim].kind;
  if (const auto* iv = std::get_if<Interval>(&a.predicate)) {
    if (std::isnan(iv->lo) || std::isnan(iv->hi)) throw data_error("atom '" + a.id + "' has NaN bounds");
    const bool ordered = iv->lo < iv->hi || (iv->lo == iv->hi && iv->lo_inclusive && iv->hi_inclusive);
    if (!ordered) throw data_error("atom '" + a.id + "' has an empty or inverted interval");
    if ((std::isinf(iv->lo) && iv->lo_inclusive) || (std::isinf(iv->hi) && iv->hi_inclusive))
      throw data_error("atom '" + a.id + "' marks an infinite bound inclusive");
  } else {
    if (kind == DimensionKind::continuous)
      throw data_error("atom '" + a.id + "' uses an equality/flag predicate on continuous dimension '" +
                       schema[a.dim].name + "'");
    if (std::holds_alternative<IsTrue>(a.predicate) && kind != DimensionKind::binary)
      throw data_error("atom '" + a.id + "' uses is_true on non-binary dimension '" + schema[a.dim].name + "'");
    if (const auto* eq = std::get_if<Equals>(&a.predicate); eq && !std::isfinite(eq->value))
      throw data_error("atom '" + a.id + "' has a non-finite equality value");
  }
}

}  // namespace

ConceptLibrary::ConceptLibrary(std::string name, StateSchema schema, std::vector<AtomicConcept> atoms)
    : name_(std::move(name)), schema_(std::move(schema)), atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw data_error("concept library '" + name_ + "' has no atoms");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    validate_atom(atoms_[i], schema_);
    if (!index_.emplace(atoms_[i].id, i).second) throw data_error("duplicate atom id '" + atoms_[i].id + "'");
  }
}

std::optional<std::size_t> ConceptLibrary::find(std::string_view id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

const AtomicConcept& ConceptLibrary::atom(std::string_view id) const {
  if (auto i = find(id)) return atoms_[*i];
  throw data_error("unknown atom '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

double require_number(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number()) throw data_error(ctx + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_string()) throw data_error(ctx + ": field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

bool optional_bool(const json& j, const char* key, bool fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw data_error(ctx + ": field '" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

StateSchema schema_from_json(const json& j) {
  if (!j.is_array()) throw data_error("'schema' must be an array of dimensions");
  std::vector<DimensionSchema> dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& d = j[i];
    const std::string ctx = "schema[" + std::to_string(i) + "]";
    DimensionSchema dim;
    dim.name = require_string(d, "name", ctx);
    dim.kind = parse_dimension_kind(require_string(d, "kind", ctx));
    if (d.contains("lower")) dim.lower = require_number(d, "lower", ctx);
    if (d.contains("upper")) dim.upper = require_number(d, "upper", ctx);
    dims.push_back(std::move(dim));
  }
  if (dims.empty()) throw data_error("'schema' has no dimensions");
  return StateSchema(std::move(dims));
}

json schema_to_json(const StateSchema& schema) {
  json out = json::array();
  for (const auto& d : schema.dims()) {
    json dj{{"name", d.name}, {"kind", std::string(to_string(d.kind))}};
    if (d.lower) dj["lower"] = *d.lower;
    if (d.upper) dj["upper"] = *d.upper;
    out.push_back(std::move(dj));
  }
  return out;
}

AtomicConcept atom_from_json(const json& a, const StateSchema& schema, std::size_t i) {
  const std::string ctx = "atoms[" + std::to_string(i) + "]";
  if (!a.is_object()) throw data_error(ctx + " must be an object");
  AtomicConcept atom;
  atom.id = require_string(a, "id", ctx);
  if (!a.contains("dim")) throw data_error(ctx + ": missing 'dim'");
  if (a["dim"].is_string()) {
    const auto d = schema.find(a["dim"].get<std::string>());
    if (!d) throw data_error(ctx + ": unknown dimension '" + a["dim"].get<std::string>() + "'");
    atom.dim = *d;
  } else if (a["dim"].is_number_unsigned()) {
    atom.dim = a["dim"].get<std::size_t>();
  } else {
    throw data_error(ctx + ": 'dim' must be a dimension name or index");
  }
  const std::string kind = require_string(a, "predicate", ctx);
  if (kind == "interval") {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Interval iv{a.contains("lo") ? require_number(a, "lo", ctx) : -inf, a.contains("hi") ? require_number(a, "hi", ctx) : inf,
                optional_bool(a, "lo_inclusive", false, ctx), optional_bool(a, "hi_inclusive", false, ctx)};
    atom.predicate = iv;
  } else if (kind == "equals") {
    atom.predicate = Equals{require_number(a, "value", ctx)};
  } else if (kind == "is_true") {
    atom.predicate = IsTrue{};
  } else {
    throw data_error(ctx + ": unknown predicate kind '" + kind + "'");
  }
  if (a.contains("description")) atom.description = require_string(a, "description", ctx);
  return atom;
}

json atom_to_json(const AtomicConcept& atom, const StateSchema& schema) {
  json j{{"id", atom.id}, {"dim", schema[atom.dim].name}};
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Interval>) {
          j["predicate"] = "interval";
          if (std::isfinite(p.lo)) {
            j["lo"] = p.lo;
            j["lo_inclusive"] = p.lo_inclusive;
          }
          if (std::isfinite(p.hi)) {
            j["hi"] = p.hi;
            j["hi_inclusive"] = p.hi_inclusive;
          }
        } else if constexpr (std::is_same_v<P, Equals>) {
          j["predicate"] = "equals";
          j["value"] = p.value;
        } else {
          j["predicate"] = "is_true";
        }
      },
      atom.predicate);
  j["description"] = atom.description;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ConceptLibrary parse_concept_library(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("malformed concept library: ") + e.what());
  }
  if (!j.is_object()) throw data_error("concept library must be a JSON object");
  if (!j.contains("schema")) throw data_error("concept library is missing 'schema'");
  if (!j.contains("atoms") || !j["atoms"].is_array()) throw data_error("concept library is missing the 'atoms' array");
  StateSchema schema = schema_from_json(j["schema"]);
  std::vector<AtomicConcept> atoms;
  for (std::size_t i = 0; i < j["atoms"].size(); ++i) atoms.push_back(atom_from_json(j["atoms"][i], schema, i));
  std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "unnamed";
  return ConceptLibrary(std::move(name), std::move(schema), std::move(atoms));
}

ConceptLibrary load_concept_library(const std::string& path) { return parse_concept_library(read_file(path)); }

std::string save_concept_library(const ConceptLibrary& library) {
  json atoms = json::array();
  for (const auto& a : library.atoms()) atoms.push_back(atom_to_json(a, library.schema()));
  json j{{"name", library.name()}, {"schema", schema_to_json(library.schema())}, {"atoms", std::move(atoms)}};
  return j.dump(2) + "\n";
}

std::vector<std::string> builtin_library_names() { return {"blackjack", "lunarlander"}; }

ConceptLibrary builtin_library(std::string_view name) {
  if (name == "lunarlander") return parse_concept_library(builtin::kLunarLanderLibrary);
  if (name == "blackjack") return parse_concept_library(builtin::kBlackjackLibrary);
  throw config_error("unknown built-in library '" + std::string(name) + "' (expected lunarlander or blackjack)");
}

ConceptLibrary resolve_library(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.starts_with(prefix)) return builtin_library(std::string_view(source).substr(prefix.size()));
  return load_concept_library(source);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

BitVector eval_atom(const AtomicConcept& atom, const StateTable& states) {
  if (atom.dim >= states.cols())
    throw data_error("atom '" + atom.id + "' refers to dimension " + std::to_string(atom.dim) +
                     " but states have " + std::to_string(states.cols()) + " columns");
  if (!std::holds_alternative<Interval>(atom.predicate) &&
      states.schema()[atom.dim].kind == DimensionKind::continuous)
    throw data_error("atom '" + atom.id + "' needs a discrete or binary column, but '" +
                     states.schema()[atom.dim].name + "' is continuous");
  const std::size_t n = states.rows();
  BitVector bits(n);
  for (std::size_t i = 0; i < n; ++i)
    if (atom.holds(states.at(i, atom.dim))) bits.set(i);
  return bits;
}

void check_schema_compatible(const ConceptLibrary& library, const StateSchema& schema) {
  const StateSchema& expected = library.schema();
  if (expected.size() != schema.size())
    throw data_error("schema mismatch: library '" + library.name() + "' has " + std::to_string(expected.size()) +
                     " dimensions, states have " + std::to_string(schema.size()));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].name != schema[i].name || expected[i].kind != schema[i].kind)
      throw data_error("schema mismatch at dimension " + std::to_string(i) + ": expected '" + expected[i].name +
                       "' (" + std::string(to_string(expected[i].kind)) + "), got '" + schema[i].name + "' (" +
                       std::string(to_string(schema[i].kind)) + ")");
  }
}

std::vector<BitVector> eval_atoms(const ConceptLibrary& library, const StateTable& states) {
  check_schema_compatible(library, states.schema());
  std::vector<BitVector> out;
  out.reserve(library.size());
  for (const auto& a : library.atoms()) out.push_back(eval_atom(a, states));
  return out;
}

AtomBits atom_bits_by_id(const ConceptLibrary& library, const std::vector<BitVector>& bits) {
  if (bits.size() != library.size()) throw data_error("atom bit count does not match library size");
  AtomBits out;
  for (std::size_t i = 0; i < bits.size(); ++i) out.emplace(library.atoms()[i].id, bits[i]);
  return out;
}

BitVector eval_formula(const Formula& f, const AtomBits& atom_bits) {
  switch (f.kind()) {
    case FormulaKind::leaf: {
      auto it = atom_bits.find(f.atom_id());
      if (it == atom_bits.end()) throw data_error("no bitvector for atom '" + f.atom_id() + "'");
      return it->second;
    }
    case FormulaKind::negation: return ~eval_formula(f.child(), atom_bits);
    case FormulaKind::conjunction: return eval_formula(f.left(), atom_bits) & eval_formula(f.right(), atom_bits);
    case FormulaKind::disjunction: return eval_formula(f.left(), atom_bits) | eval_formula(f.right(), atom_bits);
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace ccprobe
