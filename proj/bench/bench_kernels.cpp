// Times the OpenMP kernels against their serial references on the LunarLander fixture.
//
//   ccprobe-bench [--states N] [--repeats R] [--threads T] [--network PATH]
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ccprobe/dataset.hpp"
#include "ccprobe/matcher.hpp"
#include "ccprobe/network.hpp"

using namespace ccprobe;

namespace {

double best_of(std::size_t repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s %12.4f %12.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              identical ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  std::size_t n = 10000, repeats = 3;
  int threads = 0;
  std::string network = std::string(CCPROBE_SOURCE_DIR) + "/fixtures/lunarlander.net";
  app.add_option("--states", n, "synthetic state count");
  app.add_option("--repeats", repeats, "repetitions; the fastest is reported");
  app.add_option("--threads", threads, "OpenMP threads (default: runtime default)");
  app.add_option("--network", network, "network JSON");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  const NetworkSpec net = load_network(network);
  const ConceptLibrary lib = builtin_library("lunarlander");
  const StateTable states = sample_states(lib.schema(), n, 1);
  const MatchConfig config;

  std::printf("states=%zu atoms=%zu threads=%d repeats=%zu\n", n, lib.size(), omp_get_max_threads(), repeats);
  std::printf("%-18s %12s %12s %9s  %s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "outputs");

  ActivationTrace ts, tp;
  const double f_s = best_of(repeats, [&] { ts = forward_reference(net, states); });
  const double f_p = best_of(repeats, [&] { tp = forward(net, states); });
  row("forward", f_s, f_p, ts == tp);

  // One beam round's worth of candidates over the atom bitvectors.
  const std::vector<BitVector> atoms = eval_atoms(lib, states);
  std::vector<kernels::CandidateSpec> specs;
  for (const auto& a : atoms)
    for (const auto& b : atoms) {
      specs.push_back({kernels::Op::conjunction, &a, &b});
      specs.push_back({kernels::Op::disjunction, &a, &b});
    }
  const BitVector target = binarize(tp, {2, 0});
  std::vector<double> ss(specs.size()), sp(specs.size());
  const double c_s = best_of(repeats, [&] { kernels::score_candidates_reference(specs, target, ss); });
  const double c_p = best_of(repeats, [&] { kernels::score_candidates(specs, target, sp); });
  row("score_candidates", c_s, c_p, ss == sp);

  std::vector<MatchResult> rs, rp;
  const double e_s = best_of(repeats, [&] { rs = extract_all_reference(net, states, lib, config); });
  const double e_p = best_of(repeats, [&] { rp = extract_all(net, states, lib, config); });
  bool same = rs.size() == rp.size();
  for (std::size_t i = 0; same && i < rs.size(); ++i)
    same = rs[i].neuron == rp[i].neuron && rs[i].score == rp[i].score &&
           print_formula(rs[i].formula) == print_formula(rp[i].formula);
  row("extract_all", e_s, e_p, same);
  return same && ts == tp && ss == sp ? 0 : 1;
}
