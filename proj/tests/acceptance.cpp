// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "appendix_atoms.hpp"
#include "ccprobe/cli.hpp"
#include "ccprobe/dataset.hpp"
#include "ccprobe/matcher.hpp"
#include "ccprobe/perturb.hpp"
#include "ccprobe/report.hpp"
#include "support.hpp"

using namespace ccprobe;
namespace fs = std::filesystem;
namespace t = ccprobe::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// 1. Boolean algebra -------------------------------------------------------------------------------
Outcome boolean_algebra() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  const auto ids = t::atom_ids(6);
  std::size_t cases = 0, failures = 0;
  for (int i = 0; i < 1200; ++i) {
    std::uniform_int_distribution<std::size_t> n_dist(1, 256), len(1, 8);
    const std::size_t n = n_dist(rng);
    AtomBits bits;
    for (const auto& id : ids) bits[id] = t::random_bits(rng, n);
    const Formula f = t::random_formula(rng, ids, len(rng));
    const Formula g = t::random_formula(rng, ids, len(rng));
    using F = Formula;
    const BitVector ef = eval_formula(f, bits);
    bool ok = ef == t::naive_eval(f, bits, n);
    ok = ok && eval_formula(F::negation(F::negation(f)), bits) == ef;
    ok = ok && eval_formula(F::negation(F::conjunction(f, g)), bits) ==
                   eval_formula(F::disjunction(F::negation(f), F::negation(g)), bits);
    ok = ok && eval_formula(F::negation(F::disjunction(f, g)), bits) ==
                   eval_formula(F::conjunction(F::negation(f), F::negation(g)), bits);
    // pointwise min / max / 1 - x
    const BitVector eg = eval_formula(g, bits);
    const BitVector conj = eval_formula(F::conjunction(f, g), bits);
    const BitVector disj = eval_formula(F::disjunction(f, g), bits);
    const BitVector neg = eval_formula(F::negation(f), bits);
    for (std::size_t s = 0; s < n && ok; ++s) {
      const int a = ef.test(s), b = eg.test(s);
      ok = conj.test(s) == (std::min(a, b) == 1) && disj.test(s) == (std::max(a, b) == 1) &&
           neg.test(s) == (1 - a == 1);
    }
    ++cases;
    if (!ok) ++failures;
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = failures == 0 && cases >= 1000 && secs < 10.0;
  o.detail = std::to_string(cases) + " random formulas (lengths 1-8), " + std::to_string(failures) +
             " violations, " + fmt("%.2f s", secs);
  return o;
}

// 2. Jaccard oracle --------------------------------------------------------------------------------
Outcome jaccard_oracle() {
  std::mt19937_64 rng(2002);
  std::size_t mismatches = 0;
  const std::size_t pairs = 2000;
  for (std::size_t i = 0; i < pairs; ++i) {
    std::uniform_int_distribution<std::size_t> n_dist(1, 1000);
    std::uniform_real_distribution<double> density(0.0, 1.0);
    const std::size_t n = n_dist(rng);
    const BitVector a = t::random_bits(rng, n, density(rng));
    const BitVector c = t::random_bits(rng, n, density(rng));
    if (jaccard(a, c) != t::naive_jaccard(t::to_bools(a), t::to_bools(c))) ++mismatches;
  }
  const bool empty_union = jaccard(BitVector(77), BitVector(77)) == 0.0;
  std::mt19937_64 r2(7);
  const BitVector x = t::random_bits(r2, 130) | BitVector::from_string(std::string(130, '0').replace(3, 1, "1"));
  const bool identity = jaccard(x, x) == 1.0;
  Outcome o;
  o.pass = mismatches == 0 && empty_union && identity;
  o.detail = std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches; empty union -> 0: " +
             (empty_union ? "yes" : "no") + "; a == c -> 1: " + (identity ? "yes" : "no");
  return o;
}

// 3. Exhaustive vs beam ----------------------------------------------------------------------------
Outcome exhaustive_vs_beam() {
  std::mt19937_64 rng(3003);
  const std::size_t instances = 60;
  std::size_t equal = 0, violations = 0;
  double worst_gap = 0.0;
  std::string gaps;
  MatchConfig cfg;
  cfg.max_length = 3;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    std::uniform_int_distribution<std::size_t> k_dist(2, 6), n_dist(32, 512);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    const std::size_t k = k_dist(rng), n = n_dist(rng);
    const ConceptLibrary lib = t::flag_library(k);
    std::vector<BitVector> bits;
    for (std::size_t i = 0; i < k; ++i) bits.push_back(t::random_bits(rng, n, density(rng)));
    const BitVector target = t::random_bits(rng, n, density(rng));
    const SearchResult beam = beam_search(target, lib, bits, cfg);
    const SearchResult best = exhaustive_search(target, lib, bits, 3);
    const double gap = best.score - beam.score;
    if (gap < 0) ++violations;
    if (gap == 0.0) ++equal;
    if (gap != 0.0) gaps += " #" + std::to_string(inst) + ":" + fmt("%.4f", gap);
    worst_gap = std::max(worst_gap, gap);
  }
  const double frac = static_cast<double>(equal) / static_cast<double>(instances);
  Outcome o;
  o.pass = violations == 0 && frac >= 0.9;
  o.detail = std::to_string(instances) + " random instances (2-6 atoms, 32-512 states, max length 3): beam == " +
             "exhaustive in " + std::to_string(equal) + " (" + fmt("%.1f%%", 100 * frac) + "), exhaustive < beam in " +
             std::to_string(violations) + ", largest gap " + fmt("%.4f", worst_gap) +
             (gaps.empty() ? "" : "; gaps:" + gaps);
  return o;
}

// 4. Planted recovery ------------------------------------------------------------------------------
Outcome planted_recovery() {
  const auto start = Clock::now();
  std::mt19937_64 rng(4004);
  const std::size_t trials = 200;
  std::size_t perfect = 0;
  double total = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::uniform_int_distribution<std::size_t> k_dist(2, 8), n_dist(256, 1024), len(1, 3);
    const std::size_t k = k_dist(rng), n = n_dist(rng);
    const ConceptLibrary lib = t::flag_library(k);
    const auto ids = t::atom_ids(k);
    std::vector<BitVector> bits;
    BitVector target;
    Formula planted;
    do {
      bits.clear();
      for (std::size_t i = 0; i < k; ++i) bits.push_back(t::random_bits(rng, n));
      planted = t::random_formula(rng, ids, len(rng));
      target = eval_formula(planted, t::bits_by_id(bits));
    } while (target.popcount() == 0 || target.popcount() == n);
    const SearchResult r = beam_search(target, lib, bits, MatchConfig{});
    total += r.score;
    if (r.score == 1.0) ++perfect;
  }
  const double secs = seconds_since(start);
  const double rate = static_cast<double>(perfect) / static_cast<double>(trials);
  const double mean = total / static_cast<double>(trials);
  Outcome o;
  o.pass = rate >= 0.95 && mean >= 0.9 && secs < 60.0;
  o.detail = std::to_string(trials) + " planted formulas (<= 3 leaves, <= 8 atoms, 256-1024 states): Jaccard 1.0 in " +
             fmt("%.1f%%", 100 * rate) + ", mean " + fmt("%.4f", mean) + ", " + fmt("%.2f s", secs);
  return o;
}

// 5. Blackjack fixture end to end ------------------------------------------------------------------
Outcome blackjack_fixture() {
  const NetworkSpec net = load_network(t::source_path("fixtures/blackjack.net"));
  const ConceptLibrary lib = builtin_library("blackjack");
  const StateTable states = sample_states(lib.schema(), 10000, 1);
  const auto results = extract_all(net, states, lib, MatchConfig{});
  const AtomBits bits = atom_bits_by_id(lib, eval_atoms(lib, states));
  const Formula high = parse_formula("P17 OR P18 OR P19 OR P20 OR P21", lib);
  const BitVector high_bits = eval_formula(high, bits);
  // The wired neuron: the one whose binarized activation best agrees with the high-sum concept.
  const ActivationTrace trace = forward(net, states);
  NeuronRef wired{2, 0};
  double wired_agreement = -1;
  for (std::size_t i = 0; i < net.hidden_width(2); ++i) {
    const double j = jaccard(binarize(trace, {2, i}), high_bits);
    if (j > wired_agreement) wired_agreement = j, wired = {2, i};
  }
  const auto it = std::find_if(results.begin(), results.end(), [&](const MatchResult& r) { return r.neuron == wired; });
  Outcome o;
  if (it == results.end()) return {false, "wired neuron " + std::to_string(wired.index) + " was filtered out"};
  const double concept_agreement = jaccard(eval_formula(it->formula, bits), high_bits);
  const std::vector<double> original{20, 9, 0};
  const std::vector<StateEdit> edits{{0, 14}};
  const PerturbationCase c = run_perturbation(net, wired, it->formula, original, edits, lib);
  const auto& labels = net.action_labels();
  const bool flip_action = c.original_action != c.perturbed_action;
  o.pass = it->score >= 0.99 && concept_agreement == 1.0 && c.concept_before && !c.concept_after &&
           c.original_activation > 0 && c.perturbed_activation <= 0 && flip_action && c.verdict == Verdict::consistent;
  o.detail = "neuron " + std::to_string(wired.index) + " matched " + print_formula(it->formula) + " with Jaccard " +
             fmt("%.4f", it->score) + "; (20,9,0) -> (14,9,0): concept " + std::to_string(c.concept_before) + "->" +
             std::to_string(c.concept_after) + ", h " + fmt("%.3f", c.original_activation) + " -> " +
             fmt("%.3f", c.perturbed_activation) + ", action " + labels[c.original_action] + " -> " +
             labels[c.perturbed_action] + ", verdict " + std::string(to_string(c.verdict));
  return o;
}

// 6. Protocol-scale extract ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome protocol_scale() {
  const fs::path root = fs::temp_directory_path() / "ccprobe_acceptance_extract";
  fs::remove_all(root);
  double secs[2] = {0, 0};
  int codes[2] = {0, 0};
  const char* threads[2] = {"1", "4"};
  for (int k = 0; k < 2; ++k) {
    const std::vector<std::string> args{"ccprobe",   "extract",      "--network", t::source_path("fixtures/lunarlander.net"),
                                        "--library", "builtin:lunarlander",      "--synth",   "10000",
                                        "--seed",    "1",            "--beam-width", "10", "--max-length", "5",
                                        "--threads", threads[k],     "--out",     (root / threads[k]).string()};
    std::ostringstream out, err;
    const auto start = Clock::now();
    codes[k] = run_cli(args, out, err);
    secs[k] = seconds_since(start);
    if (codes[k] != kExitOk) return {false, "extract --threads " + std::string(threads[k]) + " failed: " + err.str()};
  }
  const bool same_json = slurp(root / "1" / "extract.match.json") == slurp(root / "4" / "extract.match.json");
  const bool same_md = slurp(root / "1" / "extract.md") == slurp(root / "4" / "extract.md");
  const std::size_t rows = load_bundle(slurp(root / "1" / "extract.match.json")).results.size();
  Outcome o;
  o.pass = secs[0] < 300 && secs[1] < 300 && same_json && same_md && rows > 0;
  o.detail = "64-wide layer, 10000 states, 42 atoms, w=10, L=5: " + std::to_string(rows) + " neurons matched; " +
             fmt("%.2f s", secs[0]) + " (1 thread), " + fmt("%.2f s", secs[1]) + " (4 threads); outputs " +
             (same_json && same_md ? "bit-identical" : "DIFFER");
  return o;
}

// 7. Library fidelity ------------------------------------------------------------------------------
Outcome library_fidelity() {
  const ConceptLibrary ll = builtin_library("lunarlander");
  const ConceptLibrary bj = builtin_library("blackjack");
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  expect(ll.size() == 42, "LunarLander atom count");
  expect(bj.size() == 34, "Blackjack atom count");
  for (const auto& row : t::lunarlander_intervals()) {
    const auto idx = ll.find(row.id);
    if (!idx) {
      problems.push_back(row.id + " missing");
      continue;
    }
    const AtomicConcept& a = ll.atoms()[*idx];
    const auto* iv = std::get_if<Interval>(&a.predicate);
    expect(ll.schema()[a.dim].name == row.dim && iv &&
               *iv == Interval{row.lo, row.hi, row.lo_inclusive, row.hi_inclusive},
           row.id + " bounds");
  }
  for (const char* leg : {"RLeg", "LLeg"}) {
    const auto idx = ll.find(leg);
    expect(idx && std::holds_alternative<IsTrue>(ll.atoms()[*idx].predicate), std::string(leg) + " flag");
  }
  auto equals_on = [&](const std::string& id, const std::string& dim, double v) {
    const auto idx = bj.find(id);
    if (!idx) return false;
    const auto& a = bj.atoms()[*idx];
    const auto* eq = std::get_if<Equals>(&a.predicate);
    return eq && eq->value == v && bj.schema()[a.dim].name == dim;
  };
  for (int k = 1; k <= 21; ++k) expect(equals_on("P" + std::to_string(k), "player_sum", k), "P" + std::to_string(k));
  for (int k = 1; k <= 11; ++k) expect(equals_on("D" + std::to_string(k), "dealer_card", k), "D" + std::to_string(k));
  expect(bj.find("HasAce") && std::holds_alternative<IsTrue>(bj.atom("HasAce").predicate) && bj.atom("HasAce").dim == 2,
         "HasAce");
  expect(equals_on("NoAce", "usable_ace", 0), "NoAce");
  // spot checks, evaluated on boundary states
  const StateTable xs(ll.schema(), {-0.25, 0.5, 0, 0, 0, 0, 0, 0, -0.1, 0.5, 0, 0, 0, 0, 0, 0, 0.0, 0.5, 0, 0, 0, 0, 0, 0});
  expect(eval_atom(ll.atom("X1"), xs).to_string() == "010", "X1 strict at both ends");
  const StateTable vys(ll.schema(), {0, 0.5, 0, -0.4, 0, 0, 0, 0, 0, 0.5, 0, -0.2, 0, 0, 0, 0});
  expect(eval_atom(ll.atom("Vy3"), vys).to_string() == "10", "Vy3 closed at -0.4, open at -0.2");
  Outcome o;
  o.pass = problems.empty();
  std::string list;
  for (const auto& p : problems) list += " " + p;
  o.detail = "42 LunarLander + 34 Blackjack atoms checked against the appendix tables; " +
             (problems.empty() ? std::string("all match") : "mismatches:" + list);
  return o;
}

// 8. Five percent boundary -------------------------------------------------------------------------
Outcome five_percent_boundary() {
  // 10000 states v = 0..9999; hidden unit relu(v - c) fires on exactly 9999 - c states.
  const std::size_t n = 10000;
  const StateSchema schema({{"v", DimensionKind::continuous, 0.0, static_cast<double>(n - 1)}});
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(i);
  const StateTable states(schema, values);
  const ConceptLibrary lib("line", schema,
                           {{"High", 0, Interval{9499.0, t::kInf, false, false}, ""},
                            {"Low", 0, Interval{-t::kInf, 9499.0, false, true}, ""}});
  DenseLayer l1;
  l1.weights = Matrix(2, 1);
  l1.weights.data = {1.0, 1.0};
  l1.biases = {-9499.0, -9498.0};  // 500 and 501 active states
  DenseLayer l2;
  l2.weights = Matrix(2, 2);
  l2.weights.data = {1, 0, 0, 1};
  l2.biases = {0, 0};
  DenseLayer out;
  out.weights = Matrix(1, 2);
  out.weights.data = {1, 1};
  out.biases = {0};
  out.activation = Activation::identity;
  const NetworkSpec net({l1, l2, out}, OutputKind::action_values, {"a"});
  const ActivationTrace trace = forward(net, states);
  const std::size_t at_5 = binarize(trace, {2, 0}).popcount();
  const std::size_t above = binarize(trace, {2, 1}).popcount();
  const auto active = active_neurons(trace, 2, 0.0, 0.05);
  const auto results = extract_all(net, states, lib, MatchConfig{});
  const bool filter_ok = active.size() == 1 && active[0].index == 1;
  const bool extract_ok = results.size() == 1 && results[0].neuron.index == 1;
  Outcome o;
  o.pass = at_5 == 500 && above == 501 && filter_ok && extract_ok;
  o.detail = "neuron active in " + std::to_string(at_5) + "/10000 states " +
             (filter_ok ? "excluded" : "NOT excluded") + ", neuron active in " + std::to_string(above) +
             "/10000 states " + (filter_ok ? "included" : "NOT included") + "; extract matched " +
             std::to_string(results.size()) + " neuron(s)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "boolean algebra", boolean_algebra},
      {2, "jaccard oracle", jaccard_oracle},
      {3, "exhaustive vs beam", exhaustive_vs_beam},
      {4, "planted concept recovery", planted_recovery},
      {5, "blackjack fixture perturbation", blackjack_fixture},
      {6, "protocol-scale extract", protocol_scale},
      {7, "concept library fidelity", library_fidelity},
      {8, "five percent activity filter", five_percent_boundary},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
