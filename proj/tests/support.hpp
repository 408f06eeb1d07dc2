// Shared generators and naive oracles for the test suites.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ccprobe/bitvector.hpp"
#include "ccprobe/concepts.hpp"

namespace ccprobe::testing {

inline std::string source_path(const std::string& relative) { return std::string(CCPROBE_SOURCE_DIR) + "/" + relative; }

inline BitVector random_bits(std::mt19937_64& rng, std::size_t n, double density = 0.5) {
  std::bernoulli_distribution coin(density);
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, coin(rng));
  return v;
}

inline std::vector<bool> to_bools(const BitVector& v) {
  std::vector<bool> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.test(i);
  return out;
}

/// Atom ids A0..A{k-1}.
inline std::vector<std::string> atom_ids(std::size_t k) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k; ++i) ids.push_back("A" + std::to_string(i));
  return ids;
}

/// Random AST with exactly `leaves` leaves; NOT is inserted with probability `p_not` at each node.
inline Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& ids, std::size_t leaves,
                              double p_not = 0.3) {
  std::bernoulli_distribution negate(p_not);
  std::bernoulli_distribution conj(0.5);
  Formula f;
  if (leaves <= 1) {
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    f = Formula::leaf(ids[pick(rng)]);
  } else {
    std::uniform_int_distribution<std::size_t> split(1, leaves - 1);
    const std::size_t left = split(rng);
    Formula l = random_formula(rng, ids, left, p_not);
    Formula r = random_formula(rng, ids, leaves - left, p_not);
    f = conj(rng) ? Formula::conjunction(l, r) : Formula::disjunction(l, r);
  }
  return negate(rng) ? Formula::negation(f) : f;
}

/// Per-state interpreter written directly from the min / max / 1 - x semantics.
inline int naive_value(const Formula& f, const AtomBits& bits, std::size_t state) {
  switch (f.kind()) {
    case FormulaKind::leaf: return bits.at(f.atom_id()).test(state) ? 1 : 0;
    case FormulaKind::negation: return 1 - naive_value(f.child(), bits, state);
    case FormulaKind::conjunction:
      return std::min(naive_value(f.left(), bits, state), naive_value(f.right(), bits, state));
    case FormulaKind::disjunction:
      return std::max(naive_value(f.left(), bits, state), naive_value(f.right(), bits, state));
  }
  return -1;
}

inline BitVector naive_eval(const Formula& f, const AtomBits& bits, std::size_t n) {
  BitVector out(n);
  for (std::size_t s = 0; s < n; ++s) out.set(s, naive_value(f, bits, s) == 1);
  return out;
}

/// Jaccard computed on explicit index sets.
inline double naive_jaccard(const std::vector<bool>& a, const std::vector<bool>& c) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && c[i]) ? 1 : 0;
    uni += (a[i] || c[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Library of k binary dimensions d0..d{k-1} with atoms A_i := IsTrue(d_i). Useful whenever the test
/// supplies atom truth vectors directly.
inline ConceptLibrary flag_library(std::size_t k) {
  std::vector<DimensionSchema> dims;
  std::vector<AtomicConcept> atoms;
  for (std::size_t i = 0; i < k; ++i) {
    dims.push_back({"d" + std::to_string(i), DimensionKind::binary, 0.0, 1.0});
    atoms.push_back({"A" + std::to_string(i), i, IsTrue{}, ""});
  }
  return ConceptLibrary("flags", StateSchema(dims), atoms);
}

inline AtomBits bits_by_id(const std::vector<BitVector>& bits) {
  AtomBits out;
  for (std::size_t i = 0; i < bits.size(); ++i) out.emplace("A" + std::to_string(i), bits[i]);
  return out;
}

}  // namespace ccprobe::testing
