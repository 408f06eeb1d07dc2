#include "ccprobe/matcher.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccprobe/dataset.hpp"
#include "ccprobe/error.hpp"

namespace ccprobe {

void MatchConfig::validate() const {
  if (beam_width < 1) throw config_error("beam width must be at least 1");
  if (max_length < 1) throw config_error("max formula length must be at least 1");
  if (!(min_active_frac >= 0.0 && min_active_frac <= 1.0)) throw config_error("min active fraction must lie in [0, 1]");
}

double jaccard(const BitVector& a, const BitVector& c) {
  const std::size_t uni = union_count(a, c);
  if (uni == 0) return 0.0;
  return static_cast<double>(intersection_count(a, c)) / static_cast<double>(uni);
}

bool ranks_before(double score_a, std::size_t leaves_a, const std::string& text_a, double score_b,
                  std::size_t leaves_b, const std::string& text_b) {
  if (score_a != score_b) return score_a > score_b;
  if (leaves_a != leaves_b) return leaves_a < leaves_b;
  return text_a < text_b;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

namespace kernels {

namespace {

double score_one(const CandidateSpec& c, const BitVector& target) {
  const auto t = target.words();
  const auto l = c.left->words();
  std::size_t inter = 0;
  std::size_t uni = 0;
  switch (c.op) {
    case Op::conjunction: {
      const auto r = c.right->words();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const BitVector::Word w = l[i] & r[i];
        inter += static_cast<std::size_t>(std::popcount(w & t[i]));
        uni += static_cast<std::size_t>(std::popcount(w | t[i]));
      }
      break;
    }
    case Op::disjunction: {
      const auto r = c.right->words();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const BitVector::Word w = l[i] | r[i];
        inter += static_cast<std::size_t>(std::popcount(w & t[i]));
        uni += static_cast<std::size_t>(std::popcount(w | t[i]));
      }
      break;
    }
    case Op::negation: {
      const std::size_t n = target.size();
      const std::size_t tail = n % BitVector::kWordBits;
      for (std::size_t i = 0; i < t.size(); ++i) {
        BitVector::Word w = ~l[i];
        if (i + 1 == t.size() && tail != 0) w &= (BitVector::Word{1} << tail) - 1;
        inter += static_cast<std::size_t>(std::popcount(w & t[i]));
        uni += static_cast<std::size_t>(std::popcount(w | t[i]));
      }
      break;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

void score_candidates(std::span<const CandidateSpec> candidates, const BitVector& target, std::span<double> scores) {
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    scores[static_cast<std::size_t>(i)] = score_one(candidates[static_cast<std::size_t>(i)], target);
}

void score_candidates_reference(std::span<const CandidateSpec> candidates, const BitVector& target,
                                std::span<double> scores) {
  for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = score_one(candidates[i], target);
}

BitVector materialize(const CandidateSpec& c) {
  switch (c.op) {
    case Op::conjunction: return *c.left & *c.right;
    case Op::disjunction: return *c.left | *c.right;
    case Op::negation: return ~*c.left;
  }
  return {};
}

}  // namespace kernels

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

namespace {

using kernels::CandidateSpec;
using kernels::Op;

struct Entry {
  Formula formula;
  std::string text;
  BitVector bits;
  double score = 0.0;
  std::size_t leaves = 0;
};

bool entry_before(const Entry& a, const Entry& b) {
  return ranks_before(a.score, a.leaves, a.text, b.score, b.leaves, b.text);
}

struct Pending {
  CandidateSpec spec;
  const Entry* left;
  const Entry* right;
  std::size_t leaves;
  std::string text;
  double score = 0.0;
};

std::string compose_text(Op op, const Entry& left, const Entry* right) {
  if (op == Op::negation) return "(NOT " + left.text + ")";
  std::string s;
  s.reserve(left.text.size() + right->text.size() + 7);
  s += '(';
  s += left.text;
  s += op == Op::conjunction ? " AND " : " OR ";
  s += right->text;
  s += ')';
  return s;
}

Entry realize(const Pending& p) {
  Formula f = p.spec.op == Op::negation   ? Formula::negation(p.left->formula)
              : p.spec.op == Op::conjunction ? Formula::conjunction(p.left->formula, p.right->formula)
                                             : Formula::disjunction(p.left->formula, p.right->formula);
  return Entry{std::move(f), p.text, kernels::materialize(p.spec), p.score, p.leaves};
}

void check_inputs(const BitVector& target, const ConceptLibrary& library, std::span<const BitVector> atom_bits) {
  if (library.size() == 0) throw data_error("concept library is empty");
  if (atom_bits.size() != library.size())
    throw data_error("expected bitvectors for " + std::to_string(library.size()) + " atoms, got " +
                     std::to_string(atom_bits.size()));
  for (const auto& b : atom_bits)
    if (b.size() != target.size())
      throw data_error("atom bitvector length " + std::to_string(b.size()) + " does not match target length " +
                       std::to_string(target.size()));
}

/// Bitvector-keyed set used for semantic dedupe.
class SeenSet {
 public:
  bool insert(const BitVector* bits) {
    auto& bucket = buckets_[bits->hash()];
    for (const BitVector* other : bucket)
      if (*other == *bits) return false;
    bucket.push_back(bits);
    return true;
  }

 private:
  std::unordered_map<std::uint64_t, std::vector<const BitVector*>> buckets_;
};

SearchResult beam_search_impl(const BitVector& target, const ConceptLibrary& library,
                              std::span<const BitVector> atom_bits, const MatchConfig& config, bool parallel) {
  config.validate();
  check_inputs(target, library, atom_bits);

  std::vector<Entry> atoms;
  atoms.reserve(library.size());
  for (std::size_t i = 0; i < library.size(); ++i) {
    const std::string& id = library.atoms()[i].id;
    atoms.push_back(Entry{Formula::leaf(id), id, atom_bits[i], jaccard(target, atom_bits[i]), 1});
  }
  // Negation is free, so every literal is a length-1 formula and competes for the best from the start.
  std::vector<Entry> literals = atoms;
  for (const Entry& a : atoms) {
    BitVector bits = ~a.bits;
    const double score = jaccard(target, bits);
    literals.push_back(Entry{Formula::negation(a.formula), "(NOT " + a.text + ")", std::move(bits), score, 1});
  }

  Entry best = *std::min_element(literals.begin(), literals.end(), entry_before);
  if (config.expansion == Expansion::beam_pairs) literals.clear();
  std::vector<Entry> beam = atoms;

  for (std::size_t round = 2; round <= config.max_length; ++round) {
    std::vector<Pending> pending;
    auto emit = [&](Op op, const Entry& left, const Entry* right) {
      const std::size_t leaves = left.leaves + (right ? right->leaves : 0);
      if (leaves > config.max_length) return;
      const BitVector* right_bits = right ? &right->bits : nullptr;
      pending.push_back(Pending{CandidateSpec{op, &left.bits, right_bits}, &left, right, leaves, {}, 0.0});
    };
    // With literal expansion, negated beam members pair in the same round: negation costs no length,
    // so it should not cost a round either.
    std::vector<Entry> members = beam;
    if (config.expansion == Expansion::with_literals) {
      for (const Entry& c : beam) {
        BitVector bits = ~c.bits;
        const double score = jaccard(target, bits);
        members.push_back(Entry{Formula::negation(c.formula), compose_text(Op::negation, c, nullptr), std::move(bits),
                                score, c.leaves});
      }
    }
    for (const Entry& c1 : members) {
      for (const Entry& c2 : members) {
        emit(Op::conjunction, c1, &c2);
        emit(Op::disjunction, c1, &c2);
      }
      for (const Entry& c2 : literals) {
        emit(Op::conjunction, c1, &c2);
        emit(Op::disjunction, c1, &c2);
      }
    }
    for (const Entry& c1 : beam) emit(Op::negation, c1, nullptr);
    if (pending.empty()) break;

    std::vector<CandidateSpec> specs(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) specs[i] = pending[i].spec;
    std::vector<double> scores(pending.size());
    if (parallel)
      kernels::score_candidates(specs, target, scores);
    else
      kernels::score_candidates_reference(specs, target, scores);

    const auto n = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(static) if (parallel && n > 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      Pending& p = pending[static_cast<std::size_t>(i)];
      p.score = scores[static_cast<std::size_t>(i)];
      p.text = compose_text(p.spec.op, *p.left, p.right);
    }

    std::vector<std::size_t> order(pending.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Pending& x = pending[a];
      const Pending& y = pending[b];
      return ranks_before(x.score, x.leaves, x.text, y.score, y.leaves, y.text);
    });

    std::vector<Entry> next;
    next.reserve(config.beam_width);
    SeenSet seen;
    for (std::size_t idx : order) {
      if (next.size() == config.beam_width) break;
      Entry e = realize(pending[idx]);
      if (config.dedupe) {
        // `next` is reserved, so element addresses stay put while it fills.
        next.push_back(std::move(e));
        if (!seen.insert(&next.back().bits)) next.pop_back();
      } else {
        next.push_back(std::move(e));
      }
    }
    if (!next.empty() && entry_before(next.front(), best)) best = next.front();
    beam = std::move(next);
  }
  return SearchResult{best.formula, best.score};
}

}  // namespace

SearchResult beam_search(const BitVector& target, const ConceptLibrary& library, std::span<const BitVector> atom_bits,
                         const MatchConfig& config) {
  return beam_search_impl(target, library, atom_bits, config, true);
}

SearchResult beam_search(const BitVector& target, const ConceptLibrary& library, const AtomBits& atom_bits,
                         const MatchConfig& config) {
  std::vector<BitVector> ordered;
  ordered.reserve(library.size());
  for (const auto& a : library.atoms()) {
    auto it = atom_bits.find(a.id);
    if (it == atom_bits.end()) throw data_error("no bitvector for atom '" + a.id + "'");
    ordered.push_back(it->second);
  }
  return beam_search(target, library, ordered, config);
}

SearchResult exhaustive_search(const BitVector& target, const ConceptLibrary& library,
                               std::span<const BitVector> atom_bits, std::size_t max_length, std::size_t budget) {
  if (max_length < 1) throw config_error("max formula length must be at least 1");
  check_inputs(target, library, atom_bits);

  // levels[k] holds the canonical representative of every bitvector first reachable with k leaves.
  std::vector<std::vector<Entry>> levels(max_length + 1);
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::size_t, std::size_t>>> index;
  auto find_slot = [&](const BitVector& bits) -> std::pair<std::size_t, std::size_t>* {
    auto it = index.find(bits.hash());
    if (it == index.end()) return nullptr;
    for (auto& slot : it->second)
      if (levels[slot.first][slot.second].bits == bits) return &slot;
    return nullptr;
  };
  auto offer = [&](std::size_t level, Entry e) {
    if (auto* slot = find_slot(e.bits)) {
      Entry& existing = levels[slot->first][slot->second];
      if (slot->first == level && e.text < existing.text) existing = std::move(e);
      return;
    }
    const std::uint64_t h = e.bits.hash();
    levels[level].push_back(std::move(e));
    index[h].emplace_back(level, levels[level].size() - 1);
  };

  std::size_t enumerated = 0;
  auto charge = [&](std::size_t count) {
    enumerated += count;
    if (enumerated > budget)
      throw Error(ErrorKind::budget, "exhaustive search needs more than " + std::to_string(budget) +
                                          " candidates; lower the max length or shrink the library");
  };

  charge(2 * library.size());
  for (std::size_t i = 0; i < library.size(); ++i) {
    const std::string& id = library.atoms()[i].id;
    offer(1, Entry{Formula::leaf(id), id, atom_bits[i], jaccard(target, atom_bits[i]), 1});
  }
  for (std::size_t i = 0; i < library.size(); ++i) {
    const std::string& id = library.atoms()[i].id;
    BitVector bits = ~atom_bits[i];
    const double score = jaccard(target, bits);
    offer(1, Entry{Formula::negation(Formula::leaf(id)), "(NOT " + id + ")", std::move(bits), score, 1});
  }

  for (std::size_t k = 2; k <= max_length; ++k) {
    std::size_t count = 0;
    for (std::size_t i = 1; i <= k / 2; ++i) {
      const std::size_t j = k - i;
      const std::size_t a = levels[i].size();
      const std::size_t b = levels[j].size();
      count += 2 * (i == j ? a * (a + 1) / 2 : a * b);
    }
    charge(count);
    for (std::size_t i = 1; i <= k / 2; ++i) {
      const std::size_t j = k - i;
      // Snapshot sizes: offers at level k never touch levels i, j < k.
      const std::size_t a_count = levels[i].size();
      const std::size_t b_count = levels[j].size();
      for (std::size_t x = 0; x < a_count; ++x) {
        for (std::size_t y = (i == j ? x : 0); y < b_count; ++y) {
          for (Op op : {Op::conjunction, Op::disjunction}) {
            const Entry& l = levels[i][x];
            const Entry& r = levels[j][y];
            // Commutative ops: keep the operand order with the smaller text.
            const bool swap = r.text < l.text;
            const Entry& first = swap ? r : l;
            const Entry& second = swap ? l : r;
            BitVector bits = op == Op::conjunction ? first.bits & second.bits : first.bits | second.bits;
            const auto* slot = find_slot(bits);
            if (slot && slot->first < k) continue;  // reachable with fewer leaves
            std::string text = compose_text(op, first, &second);
            if (slot && !(text < levels[slot->first][slot->second].text)) continue;
            const double score = jaccard(target, bits);
            Formula f = op == Op::conjunction ? Formula::conjunction(first.formula, second.formula)
                                              : Formula::disjunction(first.formula, second.formula);
            offer(k, Entry{std::move(f), std::move(text), std::move(bits), score, k});
          }
        }
      }
    }
  }

  const Entry* best = nullptr;
  for (const auto& level : levels)
    for (const Entry& e : level)
      if (!best || entry_before(e, *best)) best = &e;
  return SearchResult{best->formula, best->score};
}

// ---------------------------------------------------------------------------
// Per-neuron extraction
// ---------------------------------------------------------------------------

namespace {

MatchResult match_impl(const ActivationTrace& trace, const NeuronRef& neuron, const ConceptLibrary& library,
                       std::span<const BitVector> atom_bits, const MatchConfig& config, bool parallel) {
  const BitVector target = binarize(trace, neuron, config.beta);
  SearchResult found = beam_search_impl(target, library, atom_bits, config, parallel);
  const double frac =
      target.size() == 0 ? 0.0 : static_cast<double>(target.popcount()) / static_cast<double>(target.size());
  const std::size_t length = found.formula.leaf_count();
  return MatchResult{neuron, std::move(found.formula), found.score, length, frac};
}

std::vector<MatchResult> extract_impl(const NetworkSpec& net, const StateTable& states, const ConceptLibrary& library,
                                      const MatchConfig& config, std::size_t layer, bool parallel) {
  config.validate();
  check_schema_compatible(library, states.schema());
  net.hidden_width(layer);
  const ActivationTrace trace = parallel ? forward(net, states) : forward_reference(net, states);
  const std::vector<BitVector> atom_bits = eval_atoms(library, states);
  const std::vector<NeuronRef> neurons = active_neurons(trace, layer, config.beta, config.min_active_frac);

  std::vector<std::optional<MatchResult>> slots(neurons.size());
  const auto n = static_cast<std::ptrdiff_t>(neurons.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      slots[u] = match_impl(trace, neurons[u], library, atom_bits, config, true);
    }
  } else {
    for (std::size_t u = 0; u < neurons.size(); ++u)
      slots[u] = match_impl(trace, neurons[u], library, atom_bits, config, false);
  }

  std::vector<MatchResult> results;
  results.reserve(slots.size());
  for (auto& s : slots) results.push_back(std::move(*s));
  std::stable_sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.neuron < b.neuron;
  });
  return results;
}

}  // namespace

MatchResult match_neuron(const ActivationTrace& trace, const NeuronRef& neuron, const ConceptLibrary& library,
                         std::span<const BitVector> atom_bits, const MatchConfig& config) {
  return match_impl(trace, neuron, library, atom_bits, config, true);
}

std::vector<MatchResult> extract_all(const NetworkSpec& net, const StateTable& states, const ConceptLibrary& library,
                                     const MatchConfig& config, std::size_t layer) {
  return extract_impl(net, states, library, config, layer, true);
}

std::vector<MatchResult> extract_all_reference(const NetworkSpec& net, const StateTable& states,
                                               const ConceptLibrary& library, const MatchConfig& config,
                                               std::size_t layer) {
  return extract_impl(net, states, library, config, layer, false);
}

}  // namespace ccprobe
