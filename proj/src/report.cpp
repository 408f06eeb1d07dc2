#include "ccprobe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "ccprobe/dataset.hpp"
#include "ccprobe/error.hpp"

namespace ccprobe {

using nlohmann::json;

void validate_bundle(const ReportBundle& bundle) {
  const auto& widths = bundle.manifest.hidden_widths;
  auto check = [&](const NeuronRef& n, const char* what) {
    if (n.layer == 0 || n.layer > widths.size() || n.index >= widths[n.layer - 1])
      throw data_error(std::string(what) + " refers to neuron " + std::to_string(n.index) + " of hidden layer " +
                       std::to_string(n.layer) + ", which the manifest's network does not have");
  };
  for (const auto& r : bundle.results) check(r.neuron, "match result");
  for (const auto& c : bundle.cases) check(c.neuron, "perturbation case");
  const std::size_t actions = bundle.manifest.action_labels.size();
  auto check_weights = [&](const std::vector<std::vector<double>>& weights, std::size_t rows, const char* what) {
    if (weights.size() != rows) throw data_error(std::string(what) + " weights do not line up with the " + what + "s");
    for (const auto& w : weights)
      if (w.size() != actions)
        throw data_error(std::string(what) + " has " + std::to_string(w.size()) + " weights for " +
                         std::to_string(actions) + " actions");
  };
  check_weights(bundle.result_weights, bundle.results.size(), "match result");
  check_weights(bundle.case_weights, bundle.cases.size(), "perturbation case");
}

// ---------------------------------------------------------------------------
// Markdown
// ---------------------------------------------------------------------------

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.00"
  return s;
}

std::string state_text(std::span<const double> state) {
  std::string s = "(";
  for (std::size_t i = 0; i < state.size(); ++i) s += (i ? ", " : "") + format_double(state[i]);
  return s + ")";
}

std::string action_text(const Manifest& m, const std::vector<double>& outputs, std::size_t action) {
  if (m.output_kind == OutputKind::action_values && action < m.action_labels.size())
    return "Action: " + m.action_labels[action];
  std::string s = "Output: (";
  for (std::size_t i = 0; i < outputs.size(); ++i) s += (i ? ", " : "") + fixed(outputs[i], 3);
  return s + ")";
}

}  // namespace

std::string render_markdown(const ReportBundle& bundle) {
  const Manifest& m = bundle.manifest;
  std::string out;
  out += "### Hidden layer " + std::to_string(m.layer) + " concept matches\n\n";
  out += "| Neuron | Jaccard | Length | Logical Formula |";
  for (const auto& label : m.action_labels) out += " w_" + label + " |";
  out += "\n|---:|---:|---:|:---|";
  for (std::size_t i = 0; i < m.action_labels.size(); ++i) out += "---:|";
  out += '\n';

  std::vector<std::size_t> order(bundle.results.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return bundle.results[a].score > bundle.results[b].score; });
  for (std::size_t i : order) {
    const MatchResult& r = bundle.results[i];
    out += "| " + std::to_string(r.neuron.index) + " | " + fixed(r.score, 2) + " | " + std::to_string(r.length) +
           " | " + print_formula(r.formula) + " |";
    if (i < bundle.result_weights.size())
      for (double w : bundle.result_weights[i]) out += " " + fixed(w, 3) + " |";
    out += '\n';
  }
  if (!m.hidden_widths.empty() && m.layer < m.hidden_widths.size())
    out += "\nWeights for hidden layer " + std::to_string(m.layer) +
           " are linearized path products through the downstream layers (nonlinearities ignored).\n";

  if (!bundle.cases.empty()) {
    out += "\n### Targeted perturbations\n\n";
    out += "| Neuron | Concept | Connection Weights | Original State | Perturbed State | Verdict |\n";
    out += "|---:|:---|:---|:---|:---|:---|\n";
    for (std::size_t i = 0; i < bundle.cases.size(); ++i) {
      const PerturbationCase& c = bundle.cases[i];
      std::string weights = "(";
      if (i < bundle.case_weights.size())
        for (std::size_t k = 0; k < bundle.case_weights[i].size(); ++k)
          weights += (k ? ", " : "") + fixed(bundle.case_weights[i][k], 3);
      weights += ")";
      auto side = [&](const std::vector<double>& outputs, std::size_t action, const std::vector<double>& state,
                      double activation, const char* prime) {
        return action_text(m, outputs, action) + "<br>State: " + state_text(state) + "<br>h(s" + prime +
               ") = " + fixed(activation, 3) + (activation > c.beta ? " (active)" : " (inactive)");
      };
      out += "| " + std::to_string(c.neuron.index) + " | " + print_formula(c.formula) + " | " + weights + " | " +
             side(c.original_outputs, c.original_action, c.original, c.original_activation, "") + " | " +
             side(c.perturbed_outputs, c.perturbed_action, c.perturbed, c.perturbed_activation, "'") + " | " +
             std::string(to_string(c.verdict)) + " |\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json config_to_json(const MatchConfig& c) {
  return json{{"beam_width", c.beam_width},
              {"max_length", c.max_length},
              {"beta", c.beta},
              {"min_active_frac", c.min_active_frac},
              {"dedupe", c.dedupe},
              {"expansion", c.expansion == Expansion::with_literals ? "with_literals" : "beam_pairs"}};
}

MatchConfig config_from_json(const json& j) {
  MatchConfig c;
  c.beam_width = j.at("beam_width").get<std::size_t>();
  c.max_length = j.at("max_length").get<std::size_t>();
  c.beta = j.at("beta").get<double>();
  c.min_active_frac = j.at("min_active_frac").get<double>();
  c.dedupe = j.at("dedupe").get<bool>();
  c.expansion = j.at("expansion").get<std::string>() == "beam_pairs" ? Expansion::beam_pairs : Expansion::with_literals;
  return c;
}

json manifest_to_json(const Manifest& m) {
  json j{{"run_id", m.run_id},
         {"tool_version", m.tool_version},
         {"network", json{{"source", m.network_source},
                          {"sha256", m.network_sha256},
                          {"hidden_widths", m.hidden_widths},
                          {"action_labels", m.action_labels},
                          {"output_kind", std::string(to_string(m.output_kind))}}},
         {"library", json{{"name", m.library_name}, {"source", m.library_source}, {"sha256", m.library_sha256}}},
         {"states", json{{"source", m.state_source},
                         {"sha256", m.states_sha256},
                         {"count", m.state_count},
                         {"dimensions", m.dimensions}}},
         {"layer", m.layer},
         {"config", config_to_json(m.config)}};
  j["states"]["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  const json& n = j.at("network");
  m.network_source = n.at("source").get<std::string>();
  m.network_sha256 = n.at("sha256").get<std::string>();
  m.hidden_widths = n.at("hidden_widths").get<std::vector<std::size_t>>();
  m.action_labels = n.at("action_labels").get<std::vector<std::string>>();
  m.output_kind = parse_output_kind(n.at("output_kind").get<std::string>());
  const json& l = j.at("library");
  m.library_name = l.at("name").get<std::string>();
  m.library_source = l.at("source").get<std::string>();
  m.library_sha256 = l.at("sha256").get<std::string>();
  const json& s = j.at("states");
  m.state_source = s.at("source").get<std::string>();
  m.states_sha256 = s.at("sha256").get<std::string>();
  m.state_count = s.at("count").get<std::size_t>();
  m.dimensions = s.at("dimensions").get<std::vector<std::string>>();
  if (!s.at("seed").is_null()) m.seed = s.at("seed").get<std::uint64_t>();
  m.layer = j.at("layer").get<std::size_t>();
  m.config = config_from_json(j.at("config"));
  return m;
}

json neuron_to_json(const NeuronRef& n) { return json{{"layer", n.layer}, {"index", n.index}}; }
NeuronRef neuron_from_json(const json& j) { return {j.at("layer").get<std::size_t>(), j.at("index").get<std::size_t>()}; }

json case_to_json(const PerturbationCase& c) {
  json edits = json::array();
  for (const auto& e : c.edits) edits.push_back(json{{"dim", e.dim}, {"value", e.value}});
  return json{{"neuron", neuron_to_json(c.neuron)},
              {"formula", print_formula(c.formula)},
              {"original", c.original},
              {"edits", std::move(edits)},
              {"perturbed", c.perturbed},
              {"original_activation", c.original_activation},
              {"perturbed_activation", c.perturbed_activation},
              {"original_outputs", c.original_outputs},
              {"perturbed_outputs", c.perturbed_outputs},
              {"original_action", c.original_action},
              {"perturbed_action", c.perturbed_action},
              {"output_delta_l2", c.output_delta_l2},
              {"sign_changes", c.sign_changes},
              {"concept_before", c.concept_before},
              {"concept_after", c.concept_after},
              {"beta", c.beta},
              {"verdict", std::string(to_string(c.verdict))}};
}

PerturbationCase case_from_json(const json& j) {
  PerturbationCase c;
  c.neuron = neuron_from_json(j.at("neuron"));
  c.formula = parse_formula(j.at("formula").get<std::string>());
  c.original = j.at("original").get<std::vector<double>>();
  for (const auto& e : j.at("edits")) c.edits.push_back({e.at("dim").get<std::size_t>(), e.at("value").get<double>()});
  c.perturbed = j.at("perturbed").get<std::vector<double>>();
  c.original_activation = j.at("original_activation").get<double>();
  c.perturbed_activation = j.at("perturbed_activation").get<double>();
  c.original_outputs = j.at("original_outputs").get<std::vector<double>>();
  c.perturbed_outputs = j.at("perturbed_outputs").get<std::vector<double>>();
  c.original_action = j.at("original_action").get<std::size_t>();
  c.perturbed_action = j.at("perturbed_action").get<std::size_t>();
  c.output_delta_l2 = j.at("output_delta_l2").get<double>();
  c.sign_changes = j.at("sign_changes").get<std::vector<std::size_t>>();
  c.concept_before = j.at("concept_before").get<bool>();
  c.concept_after = j.at("concept_after").get<bool>();
  c.beta = j.at("beta").get<double>();
  c.verdict = j.at("verdict").get<std::string>() == "consistent" ? Verdict::consistent : Verdict::inconsistent;
  return c;
}

}  // namespace

std::string render_json(const ReportBundle& bundle) {
  json results = json::array();
  for (std::size_t i = 0; i < bundle.results.size(); ++i) {
    const MatchResult& r = bundle.results[i];
    json row{{"neuron", neuron_to_json(r.neuron)},
             {"formula", print_formula(r.formula)},
             {"score", r.score},
             {"length", r.length},
             {"activation_frac", r.activation_frac}};
    row["weights"] = i < bundle.result_weights.size() ? json(bundle.result_weights[i]) : json::array();
    results.push_back(std::move(row));
  }
  json cases = json::array();
  for (std::size_t i = 0; i < bundle.cases.size(); ++i) {
    json row = case_to_json(bundle.cases[i]);
    row["weights"] = i < bundle.case_weights.size() ? json(bundle.case_weights[i]) : json::array();
    cases.push_back(std::move(row));
  }
  json j{{"manifest", manifest_to_json(bundle.manifest)}, {"results", std::move(results)}, {"cases", std::move(cases)}};
  return j.dump(2) + "\n";
}

ReportBundle load_bundle(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    ReportBundle b;
    b.manifest = manifest_from_json(j.at("manifest"));
    for (const auto& row : j.at("results")) {
      MatchResult r;
      r.neuron = neuron_from_json(row.at("neuron"));
      r.formula = parse_formula(row.at("formula").get<std::string>());
      r.score = row.at("score").get<double>();
      r.length = row.at("length").get<std::size_t>();
      r.activation_frac = row.at("activation_frac").get<double>();
      b.results.push_back(std::move(r));
      b.result_weights.push_back(row.at("weights").get<std::vector<double>>());
    }
    for (const auto& row : j.at("cases")) {
      b.cases.push_back(case_from_json(row));
      b.case_weights.push_back(row.at("weights").get<std::vector<double>>());
    }
    validate_bundle(b);
    return b;
  } catch (const json::exception& e) {
    throw data_error(std::string("malformed report bundle: ") + e.what());
  }
}

ReportBundle merge_bundles(const ReportBundle& matches, const ReportBundle& cases) {
  ReportBundle out = matches;
  out.cases = cases.cases;
  out.case_weights = cases.case_weights;
  validate_bundle(out);
  return out;
}

}  // namespace ccprobe
