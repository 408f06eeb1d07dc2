#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccprobe/concepts.hpp"
#include "ccprobe/network.hpp"

namespace ccprobe {

struct StateEdit {
  std::size_t dim = 0;
  double value = 0.0;

  bool operator==(const StateEdit&) const = default;
};

enum class Verdict { consistent, inconsistent };

std::string_view to_string(Verdict v);

/// One targeted-perturbation experiment: the state before and after the edits, the neuron's
/// activation and the network's chosen action on each side.
struct PerturbationCase {
  NeuronRef neuron;
  Formula formula;
  std::vector<double> original;
  std::vector<StateEdit> edits;
  std::vector<double> perturbed;
  double original_activation = 0.0;
  double perturbed_activation = 0.0;
  std::vector<double> original_outputs;
  std::vector<double> perturbed_outputs;
  std::size_t original_action = 0;   // argmax; meaningful for action-value heads
  std::size_t perturbed_action = 0;
  double output_delta_l2 = 0.0;
  std::vector<std::size_t> sign_changes;  // output dims whose sign flipped
  bool concept_before = false;
  bool concept_after = false;
  double beta = 0.0;
  Verdict verdict = Verdict::inconsistent;

  bool action_changed(OutputKind kind) const;
};

/// Consistent iff the concept went 1 -> 0 and the activation went from > beta to <= beta.
Verdict compute_verdict(bool concept_before, bool concept_after, double original_activation,
                        double perturbed_activation, double beta);

std::vector<double> apply_edits(std::span<const double> state, std::span<const StateEdit> edits);
/// Edits that undo `edits` when applied to apply_edits(original, edits).
std::vector<StateEdit> inverse_edits(std::span<const double> original, std::span<const StateEdit> edits);

/// Truth value of `f` at a single state of `library`'s schema.
bool concept_holds(const Formula& f, const ConceptLibrary& library, std::span<const double> state);

/// Throws (data) when the original does not satisfy the formula, the neuron is inactive, the edits are
/// empty or invalid under the schema, or the edited state still satisfies the formula.
PerturbationCase run_perturbation(const NetworkSpec& net, const NeuronRef& neuron, const Formula& formula,
                                  std::span<const double> original, std::span<const StateEdit> edits,
                                  const ConceptLibrary& library, double beta = 0.0);

/// One falsifying single-dimension edit per formula dimension, nearest first (distance scaled by the
/// dimension's range). Throws (data) when no single edit falsifies the formula.
std::vector<StateEdit> suggest_edits(const Formula& formula, std::span<const double> original,
                                     const ConceptLibrary& library);

/// Hidden neurons of `layer` ordered by their weight to `action`, descending; ties keep index order.
std::vector<std::pair<NeuronRef, double>> rank_neurons_by_action(const NetworkSpec& net, std::size_t layer,
                                                                 std::size_t action, bool by_magnitude = false);

struct PerturbationRequest {
  NeuronRef neuron;
  Formula formula;
  std::vector<double> original;
  std::vector<StateEdit> edits;  // empty: use the first suggest_edits candidate
};

struct PerturbationOutcome {
  std::optional<PerturbationCase> result;
  std::string error;
};

/// Independent cases run in parallel; outcomes keep request order.
std::vector<PerturbationOutcome> run_perturbations(const NetworkSpec& net, const ConceptLibrary& library,
                                                   std::span<const PerturbationRequest> requests, double beta = 0.0);

/// "state does not satisfy ...: P17=0, P18=0" style explanation of each atom's value at a state.
std::string explain_atoms(const Formula& f, const ConceptLibrary& library, std::span<const double> state);

}  // namespace ccprobe
