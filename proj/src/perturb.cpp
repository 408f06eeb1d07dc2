#include "ccprobe/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ccprobe/dataset.hpp"
#include "ccprobe/error.hpp"

namespace ccprobe {

std::string_view to_string(Verdict v) { return v == Verdict::consistent ? "consistent" : "inconsistent"; }

bool PerturbationCase::action_changed(OutputKind kind) const {
  if (kind == OutputKind::action_values) return original_action != perturbed_action;
  return output_delta_l2 > 0.0;
}

Verdict compute_verdict(bool concept_before, bool concept_after, double original_activation,
                        double perturbed_activation, double beta) {
  const bool concept_flipped = concept_before && !concept_after;
  const bool neuron_flipped = original_activation > beta && perturbed_activation <= beta;
  return concept_flipped && neuron_flipped ? Verdict::consistent : Verdict::inconsistent;
}

std::vector<double> apply_edits(std::span<const double> state, std::span<const StateEdit> edits) {
  std::vector<double> out(state.begin(), state.end());
  for (const auto& e : edits) {
    if (e.dim >= out.size()) throw data_error("edit refers to dimension " + std::to_string(e.dim) + " of " +
                                              std::to_string(out.size()));
    out[e.dim] = e.value;
  }
  return out;
}

std::vector<StateEdit> inverse_edits(std::span<const double> original, std::span<const StateEdit> edits) {
  std::vector<StateEdit> out;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) out.push_back({it->dim, original[it->dim]});
  return out;
}

namespace {

StateTable single_row(const ConceptLibrary& library, std::span<const double> state) {
  if (state.size() != library.schema().size())
    throw data_error("state has " + std::to_string(state.size()) + " values but the schema has " +
                     std::to_string(library.schema().size()) + " dimensions");
  return StateTable(library.schema(), std::vector<double>(state.begin(), state.end()), "perturbation");
}

std::string format_state(std::span<const double> state) {
  std::string s = "(";
  for (std::size_t i = 0; i < state.size(); ++i) s += (i ? ", " : "") + format_double(state[i]);
  return s + ")";
}

struct Probe {
  double activation;
  std::vector<double> outputs;
};

Probe probe(const NetworkSpec& net, const NeuronRef& neuron, const StateTable& row) {
  const ActivationTrace trace = forward_reference(net, row);
  auto out = trace.outputs.row(0);
  return Probe{trace.activation(neuron, 0), std::vector<double>(out.begin(), out.end())};
}

}  // namespace

bool concept_holds(const Formula& f, const ConceptLibrary& library, std::span<const double> state) {
  const StateTable row = single_row(library, state);
  const AtomBits bits = atom_bits_by_id(library, eval_atoms(library, row));
  return eval_formula(f, bits).test(0);
}

std::string explain_atoms(const Formula& f, const ConceptLibrary& library, std::span<const double> state) {
  std::string s;
  for (const auto& id : formula_atoms(f)) {
    const AtomicConcept& atom = library.atom(id);
    s += (s.empty() ? "" : ", ") + id + "=" + (atom.holds(state[atom.dim]) ? "1" : "0");
  }
  return s;
}

PerturbationCase run_perturbation(const NetworkSpec& net, const NeuronRef& neuron, const Formula& formula,
                                  std::span<const double> original, std::span<const StateEdit> edits,
                                  const ConceptLibrary& library, double beta) {
  net.check(neuron);
  if (net.input_dim() != library.schema().size())
    throw data_error("network expects " + std::to_string(net.input_dim()) + " inputs but the library schema has " +
                     std::to_string(library.schema().size()) + " dimensions");
  const StateTable before = single_row(library, original);
  if (!concept_holds(formula, library, original))
    throw data_error("state " + format_state(original) + " does not satisfy " + print_formula(formula) + " (" +
                     explain_atoms(formula, library, original) + ")");
  const Probe p0 = probe(net, neuron, before);
  if (!(p0.activation > beta))
    throw data_error("neuron " + std::to_string(neuron.index) + " is inactive at " + format_state(original) +
                     " (activation " + format_double(p0.activation) + " <= " + format_double(beta) + ")");
  if (edits.empty()) throw data_error("no edits given: a perturbation needs at least one edit");
  const StateSchema& schema = library.schema();
  for (const auto& e : edits) {
    if (e.dim >= schema.size()) throw data_error("edit refers to unknown dimension " + std::to_string(e.dim));
    const auto& d = schema[e.dim];
    const bool in_bounds = (!d.lower || e.value >= *d.lower) && (!d.upper || e.value <= *d.upper);
    if (!schema.admits(e.dim, e.value) || !in_bounds)
      throw data_error("edit " + d.name + "=" + format_double(e.value) + " is not valid for the schema");
  }

  PerturbationCase c;
  c.neuron = neuron;
  c.formula = formula;
  c.original.assign(original.begin(), original.end());
  c.edits.assign(edits.begin(), edits.end());
  c.perturbed = apply_edits(original, edits);
  c.beta = beta;
  c.concept_before = true;
  c.concept_after = concept_holds(formula, library, c.perturbed);
  if (c.concept_after)
    throw data_error("edited state " + format_state(c.perturbed) + " still satisfies " + print_formula(formula) +
                     " (" + explain_atoms(formula, library, c.perturbed) + "); the edits must violate the concept");
  const Probe p1 = probe(net, neuron, single_row(library, c.perturbed));
  c.original_activation = p0.activation;
  c.perturbed_activation = p1.activation;
  c.original_outputs = p0.outputs;
  c.perturbed_outputs = p1.outputs;
  c.original_action = argmax_action(p0.outputs);
  c.perturbed_action = argmax_action(p1.outputs);
  double sq = 0.0;
  for (std::size_t i = 0; i < p0.outputs.size(); ++i) {
    const double d = p1.outputs[i] - p0.outputs[i];
    sq += d * d;
    if (std::signbit(p0.outputs[i]) != std::signbit(p1.outputs[i])) c.sign_changes.push_back(i);
  }
  c.output_delta_l2 = std::sqrt(sq);
  c.verdict = compute_verdict(c.concept_before, c.concept_after, c.original_activation, c.perturbed_activation, beta);
  return c;
}

std::vector<StateEdit> suggest_edits(const Formula& formula, std::span<const double> original,
                                     const ConceptLibrary& library) {
  if (!concept_holds(formula, library, original))
    throw data_error("state " + format_state(original) + " does not satisfy " + print_formula(formula) + " (" +
                     explain_atoms(formula, library, original) + ")");
  const StateSchema& schema = library.schema();
  std::set<std::size_t> dims;
  for (const auto& id : formula_atoms(formula)) dims.insert(library.atom(id).dim);

  struct Scored {
    StateEdit edit;
    double distance;
  };
  std::vector<Scored> found;
  for (std::size_t dim : dims) {
    const auto& d = schema[dim];
    std::vector<double> candidates;
    if (d.kind != DimensionKind::continuous) {
      double lo = d.lower ? *d.lower : original[dim];
      double hi = d.upper ? *d.upper : original[dim];
      // Unbounded discrete dims: reach one step past every equality value on this dimension.
      for (const auto& a : library.atoms()) {
        if (a.dim != dim) continue;
        if (const auto* eq = std::get_if<Equals>(&a.predicate)) {
          if (!d.lower) lo = std::min(lo, eq->value - 1);
          if (!d.upper) hi = std::max(hi, eq->value + 1);
        }
      }
      for (double v = std::ceil(lo); v <= hi; v += 1.0) candidates.push_back(v);
    } else {
      std::set<double> bounds;
      for (const auto& a : library.atoms()) {
        if (a.dim != dim) continue;
        if (const auto* iv = std::get_if<Interval>(&a.predicate)) {
          if (std::isfinite(iv->lo)) bounds.insert(iv->lo);
          if (std::isfinite(iv->hi)) bounds.insert(iv->hi);
        }
      }
      const double lower = d.lower ? *d.lower : (bounds.empty() ? original[dim] - 1.0 : *bounds.begin() - 1.0);
      const double upper = d.upper ? *d.upper : (bounds.empty() ? original[dim] + 1.0 : *bounds.rbegin() + 1.0);
      std::vector<double> cuts{lower};
      for (double b : bounds)
        if (b > lower && b < upper) cuts.push_back(b);
      cuts.push_back(upper);
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        candidates.push_back(cuts[i]);
        if (i + 1 < cuts.size()) candidates.push_back(0.5 * (cuts[i] + cuts[i + 1]));
      }
    }
    const double range = d.lower && d.upper ? *d.upper - *d.lower : 1.0;
    std::optional<Scored> nearest;
    std::vector<double> probe_state(original.begin(), original.end());
    for (double v : candidates) {
      if (v == original[dim]) continue;
      probe_state[dim] = v;
      if (concept_holds(formula, library, probe_state)) continue;
      const double dist = std::abs(v - original[dim]) / range;
      if (!nearest || dist < nearest->distance) nearest = Scored{{dim, v}, dist};
    }
    if (nearest) found.push_back(*nearest);
  }
  if (found.empty())
    throw data_error("no single-dimension edit falsifies " + print_formula(formula) + " at " + format_state(original));
  std::stable_sort(found.begin(), found.end(), [](const Scored& a, const Scored& b) { return a.distance < b.distance; });
  std::vector<StateEdit> out;
  for (const auto& s : found) out.push_back(s.edit);
  return out;
}

std::vector<std::pair<NeuronRef, double>> rank_neurons_by_action(const NetworkSpec& net, std::size_t layer,
                                                                 std::size_t action, bool by_magnitude) {
  const std::size_t width = net.hidden_width(layer);
  if (action >= net.output_dim())
    throw config_error("action " + std::to_string(action) + " out of range (network has " +
                       std::to_string(net.output_dim()) + " outputs)");
  std::vector<std::pair<NeuronRef, double>> out;
  for (std::size_t i = 0; i < width; ++i) {
    const NeuronRef ref{layer, i};
    out.emplace_back(ref, output_weights(net, ref)[action]);
  }
  std::stable_sort(out.begin(), out.end(), [by_magnitude](const auto& a, const auto& b) {
    return by_magnitude ? std::abs(a.second) > std::abs(b.second) : a.second > b.second;
  });
  return out;
}

std::vector<PerturbationOutcome> run_perturbations(const NetworkSpec& net, const ConceptLibrary& library,
                                                   std::span<const PerturbationRequest> requests, double beta) {
  std::vector<PerturbationOutcome> outcomes(requests.size());
  const auto n = static_cast<std::ptrdiff_t>(requests.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& req = requests[static_cast<std::size_t>(i)];
    auto& outcome = outcomes[static_cast<std::size_t>(i)];
    try {
      std::vector<StateEdit> edits = req.edits;
      if (edits.empty()) edits = {suggest_edits(req.formula, req.original, library).front()};
      outcome.result = run_perturbation(net, req.neuron, req.formula, req.original, edits, library, beta);
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
  }
  return outcomes;
}

}  // namespace ccprobe
