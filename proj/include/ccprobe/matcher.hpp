#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ccprobe/bitvector.hpp"
#include "ccprobe/concepts.hpp"
#include "ccprobe/network.hpp"
#include "ccprobe/state_table.hpp"

namespace ccprobe {

/// How beam search grows formulas each round.
enum class Expansion {
  /// and/or between a beam member and any beam member, atom or negated atom; plus not(member).
  with_literals,
  /// and/or between ordered beam pairs only; plus not(member).
  beam_pairs,
};

struct MatchConfig {
  std::size_t beam_width = 10;
  std::size_t max_length = 5;
  double beta = 0.0;
  double min_active_frac = 0.05;
  bool dedupe = true;
  Expansion expansion = Expansion::with_literals;

  void validate() const;
};

struct SearchResult {
  Formula formula;
  double score = 0.0;
};

struct MatchResult {
  NeuronRef neuron;
  Formula formula;
  double score = 0.0;
  std::size_t length = 0;
  double activation_frac = 0.0;
};

/// |a AND c| / |a OR c|, or 0 when the union is empty.
double jaccard(const BitVector& a, const BitVector& c);

/// Strict-weak ordering used everywhere a winner is chosen: higher score, then fewer leaves,
/// then lexicographically smaller printed form.
bool ranks_before(double score_a, std::size_t leaves_a, const std::string& text_a, double score_b,
                  std::size_t leaves_b, const std::string& text_b);

/// `atom_bits[i]` is the truth vector of `library.atoms()[i]`.
SearchResult beam_search(const BitVector& target, const ConceptLibrary& library, std::span<const BitVector> atom_bits,
                         const MatchConfig& config);
SearchResult beam_search(const BitVector& target, const ConceptLibrary& library, const AtomBits& atom_bits,
                         const MatchConfig& config);

inline constexpr std::size_t kDefaultExhaustiveBudget = 10'000'000;

/// Global optimum over every semantically distinct formula with at most `max_length` leaves built from
/// atoms, negated atoms, and/or. Equivalent formulas are represented by their fewest-leaf,
/// lexicographically smallest form. Throws ErrorKind::budget past `budget` enumerated candidates.
SearchResult exhaustive_search(const BitVector& target, const ConceptLibrary& library,
                               std::span<const BitVector> atom_bits, std::size_t max_length,
                               std::size_t budget = kDefaultExhaustiveBudget);

/// Beam search for one neuron; no activity filter.
MatchResult match_neuron(const ActivationTrace& trace, const NeuronRef& neuron, const ConceptLibrary& library,
                         std::span<const BitVector> atom_bits, const MatchConfig& config);

/// Forward once, drop neurons at or below `min_active_frac`, search each survivor.
/// Sorted by descending score, then neuron index.
std::vector<MatchResult> extract_all(const NetworkSpec& net, const StateTable& states, const ConceptLibrary& library,
                                     const MatchConfig& config, std::size_t layer = 2);
/// Same results computed with serial kernels throughout.
std::vector<MatchResult> extract_all_reference(const NetworkSpec& net, const StateTable& states,
                                               const ConceptLibrary& library, const MatchConfig& config,
                                               std::size_t layer = 2);

namespace kernels {

enum class Op { conjunction, disjunction, negation };

/// Candidate `op(left, right)`; `right` is ignored for negation.
struct CandidateSpec {
  Op op;
  const BitVector* left;
  const BitVector* right;
};

/// Jaccard score of each candidate against `target` without materializing it. OpenMP-parallel.
void score_candidates(std::span<const CandidateSpec> candidates, const BitVector& target, std::span<double> scores);
void score_candidates_reference(std::span<const CandidateSpec> candidates, const BitVector& target,
                                std::span<double> scores);

BitVector materialize(const CandidateSpec& candidate);

}  // namespace kernels

}  // namespace ccprobe
