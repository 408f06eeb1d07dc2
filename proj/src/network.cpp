#include "ccprobe/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccprobe/error.hpp"

namespace ccprobe {

using nlohmann::json;

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "identity" || text == "linear") return Activation::identity;
  throw data_error("unknown activation '" + std::string(text) + "'");
}

std::string_view to_string(OutputKind k) { return k == OutputKind::action_values ? "action_values" : "action_means"; }

OutputKind parse_output_kind(std::string_view text) {
  if (text == "action_values") return OutputKind::action_values;
  if (text == "action_means") return OutputKind::action_means;
  throw data_error("unknown output kind '" + std::string(text) + "'");
}

NetworkSpec::NetworkSpec(std::vector<DenseLayer> layers, OutputKind output_kind, std::vector<std::string> action_labels)
    : layers_(std::move(layers)), output_kind_(output_kind), action_labels_(std::move(action_labels)) {
  if (layers_.empty()) throw data_error("network has no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    const std::string where = "layer " + std::to_string(k);
    if (layer.in() == 0 || layer.out() == 0) throw data_error(where + " has an empty weight matrix");
    if (layer.weights.data.size() != layer.in() * layer.out()) throw data_error(where + " weight storage is malformed");
    if (layer.biases.size() != layer.out())
      throw data_error(where + " has " + std::to_string(layer.biases.size()) + " biases for " +
                       std::to_string(layer.out()) + " outputs");
    if (k > 0 && layers_[k - 1].out() != layer.in())
      throw data_error("dimension mismatch: layer " + std::to_string(k - 1) + " outputs " +
                       std::to_string(layers_[k - 1].out()) + " values but " + where + " expects " +
                       std::to_string(layer.in()));
    for (double w : layer.weights.data)
      if (!std::isfinite(w)) throw data_error(where + " has a non-finite weight");
    for (double b : layer.biases)
      if (!std::isfinite(b)) throw data_error(where + " has a non-finite bias");
  }
  if (layers_.back().activation != Activation::identity) throw data_error("final layer activation must be identity");
  if (action_labels_.empty())
    for (std::size_t i = 0; i < output_dim(); ++i) action_labels_.push_back("a" + std::to_string(i));
  if (action_labels_.size() != output_dim())
    throw data_error("network has " + std::to_string(output_dim()) + " outputs but " +
                     std::to_string(action_labels_.size()) + " action labels");
}

std::size_t NetworkSpec::hidden_width(std::size_t layer) const {
  if (layer == 0 || layer > hidden_layers())
    throw config_error("hidden layer " + std::to_string(layer) + " does not exist (network has " +
                       std::to_string(hidden_layers()) + ")");
  return layers_[layer - 1].out();
}

void NetworkSpec::check(const NeuronRef& neuron) const {
  const std::size_t width = hidden_width(neuron.layer);
  if (neuron.index >= width)
    throw config_error("neuron " + std::to_string(neuron.index) + " is out of range for hidden layer " +
                       std::to_string(neuron.layer) + " (width " + std::to_string(width) + ")");
}

// ---------------------------------------------------------------------------
// Weight file
// ---------------------------------------------------------------------------

NetworkSpec parse_network(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("malformed network file: ") + e.what());
  }
  try {
    const std::size_t input_dim = j.at("input_dim").get<std::size_t>();
    const OutputKind kind = j.contains("output_kind") ? parse_output_kind(j.at("output_kind").get<std::string>())
                                                      : OutputKind::action_values;
    std::vector<std::string> labels;
    if (j.contains("action_labels")) labels = j.at("action_labels").get<std::vector<std::string>>();
    std::vector<DenseLayer> layers;
    for (const json& lj : j.at("layers")) {
      DenseLayer layer;
      layer.activation = parse_activation(lj.at("activation").get<std::string>());
      const auto& rows = lj.at("weights");
      const std::size_t out = rows.size();
      const std::size_t in = out == 0 ? 0 : rows[0].size();
      layer.weights = Matrix(out, in);
      for (std::size_t r = 0; r < out; ++r) {
        if (rows[r].size() != in) throw data_error("ragged weight matrix in layer " + std::to_string(layers.size()));
        for (std::size_t c = 0; c < in; ++c) layer.weights(r, c) = rows[r][c].get<double>();
      }
      layer.biases = lj.at("biases").get<std::vector<double>>();
      layers.push_back(std::move(layer));
    }
    if (!layers.empty() && layers.front().in() != input_dim)
      throw data_error("dimension mismatch: input_dim is " + std::to_string(input_dim) + " but layer 0 expects " +
                       std::to_string(layers.front().in()));
    return NetworkSpec(std::move(layers), kind, std::move(labels));
  } catch (const json::exception& e) {
    throw data_error(std::string("malformed network file: ") + e.what());
  }
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open network file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string save_network(const NetworkSpec& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    json rows = json::array();
    for (std::size_t r = 0; r < layer.out(); ++r) {
      auto row = layer.weights.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    layers.push_back(json{{"activation", std::string(to_string(layer.activation))},
                          {"weights", std::move(rows)},
                          {"biases", layer.biases}});
  }
  json j{{"input_dim", net.input_dim()},
         {"output_kind", std::string(to_string(net.output_kind()))},
         {"action_labels", net.action_labels()},
         {"layers", std::move(layers)}};
  return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

namespace {

double apply(Activation a, double x) {
  switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::identity: return x;
  }
  return x;
}

ActivationTrace allocate_trace(const NetworkSpec& net, const StateTable& states) {
  if (states.cols() != net.input_dim())
    throw data_error("dimension mismatch: network expects " + std::to_string(net.input_dim()) +
                     " inputs but states have " + std::to_string(states.cols()) + " columns");
  ActivationTrace trace;
  const std::size_t n = states.rows();
  for (std::size_t l = 1; l <= net.hidden_layers(); ++l) trace.hidden.emplace_back(n, net.hidden_width(l));
  trace.outputs = Matrix(n, net.output_dim());
  return trace;
}

// One state through every layer. Accumulation order is fixed so any row partition gives identical bits.
void forward_row(const NetworkSpec& net, std::span<const double> input, std::size_t row, ActivationTrace& trace,
                 std::vector<double>& cur, std::vector<double>& next) {
  cur.assign(input.begin(), input.end());
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const DenseLayer& layer = layers[k];
    next.resize(layer.out());
    for (std::size_t o = 0; o < layer.out(); ++o) {
      const double* w = layer.weights.data.data() + o * layer.in();
      double acc = layer.biases[o];
      for (std::size_t i = 0; i < layer.in(); ++i) acc += w[i] * cur[i];
      next[o] = apply(layer.activation, acc);
    }
    Matrix& dst = k + 1 < layers.size() ? trace.hidden[k] : trace.outputs;
    std::copy(next.begin(), next.end(), dst.data.begin() + static_cast<std::ptrdiff_t>(row * dst.cols));
    std::swap(cur, next);
  }
}

}  // namespace

ActivationTrace forward(const NetworkSpec& net, const StateTable& states) {
  ActivationTrace trace = allocate_trace(net, states);
  const auto n = static_cast<std::ptrdiff_t>(states.rows());
#pragma omp parallel
  {
    std::vector<double> cur;
    std::vector<double> next;
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r)
      forward_row(net, states.row(static_cast<std::size_t>(r)), static_cast<std::size_t>(r), trace, cur, next);
  }
  return trace;
}

ActivationTrace forward_reference(const NetworkSpec& net, const StateTable& states) {
  ActivationTrace trace = allocate_trace(net, states);
  std::vector<double> cur;
  std::vector<double> next;
  for (std::size_t r = 0; r < states.rows(); ++r) forward_row(net, states.row(r), r, trace, cur, next);
  return trace;
}

BitVector binarize(const ActivationTrace& trace, const NeuronRef& neuron, double beta) {
  const Matrix& layer = trace.layer(neuron.layer);
  if (neuron.index >= layer.cols) throw config_error("neuron index out of range for trace");
  BitVector bits(layer.rows);
  for (std::size_t j = 0; j < layer.rows; ++j)
    if (layer(j, neuron.index) > beta) bits.set(j);
  return bits;
}

std::vector<double> output_weights(const NetworkSpec& net, const NeuronRef& neuron) {
  net.check(neuron);
  const auto& layers = net.layers();
  std::vector<double> v(net.hidden_width(neuron.layer), 0.0);
  v[neuron.index] = 1.0;
  for (std::size_t k = neuron.layer; k < layers.size(); ++k) {
    const DenseLayer& layer = layers[k];
    std::vector<double> next(layer.out(), 0.0);
    for (std::size_t o = 0; o < layer.out(); ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in(); ++i) acc += layer.weights(o, i) * v[i];
      next[o] = acc;
    }
    v = std::move(next);
  }
  return v;
}

std::size_t argmax_action(std::span<const double> outputs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < outputs.size(); ++i)
    if (outputs[i] > outputs[best]) best = i;
  return best;
}

}  // namespace ccprobe
