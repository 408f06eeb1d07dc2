#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccprobe/bitvector.hpp"
#include "ccprobe/state_table.hpp"

namespace ccprobe {

enum class Activation { relu, tanh, identity };
enum class OutputKind { action_values, action_means };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);
std::string_view to_string(OutputKind k);
OutputKind parse_output_kind(std::string_view text);

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// y = act(W x + b), W is out x in.
struct DenseLayer {
  Matrix weights;
  std::vector<double> biases;
  Activation activation = Activation::relu;

  std::size_t in() const noexcept { return weights.cols; }
  std::size_t out() const noexcept { return weights.rows; }

  bool operator==(const DenseLayer&) const = default;
};

/// Hidden neuron address. `layer` is the 1-based hidden-layer number, `index` is 0-based.
struct NeuronRef {
  std::size_t layer = 2;
  std::size_t index = 0;

  auto operator<=>(const NeuronRef&) const = default;
};

class NetworkSpec {
 public:
  NetworkSpec() = default;
  /// Validates layer chaining, finite parameters, identity output layer and label count.
  NetworkSpec(std::vector<DenseLayer> layers, OutputKind output_kind, std::vector<std::string> action_labels);

  std::size_t input_dim() const noexcept { return layers_.front().in(); }
  std::size_t output_dim() const noexcept { return layers_.back().out(); }
  std::size_t hidden_layers() const noexcept { return layers_.size() - 1; }
  std::size_t hidden_width(std::size_t layer) const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  OutputKind output_kind() const noexcept { return output_kind_; }
  const std::vector<std::string>& action_labels() const noexcept { return action_labels_; }

  /// Throws a config error when `neuron` does not address a hidden unit.
  void check(const NeuronRef& neuron) const;

  bool operator==(const NetworkSpec&) const = default;

 private:
  std::vector<DenseLayer> layers_;
  OutputKind output_kind_ = OutputKind::action_values;
  std::vector<std::string> action_labels_;
};

NetworkSpec parse_network(std::string_view json_text);
NetworkSpec load_network(const std::string& path);
/// Canonical JSON; load(save(net)) == net bit-exactly.
std::string save_network(const NetworkSpec& net);

/// Per-hidden-layer post-nonlinearity activations plus network outputs, one row per state.
struct ActivationTrace {
  std::vector<Matrix> hidden;  // hidden[l - 1] for hidden layer l
  Matrix outputs;

  std::size_t states() const noexcept { return outputs.rows; }
  const Matrix& layer(std::size_t l) const { return hidden.at(l - 1); }
  double activation(const NeuronRef& n, std::size_t state) const { return layer(n.layer)(state, n.index); }

  bool operator==(const ActivationTrace&) const = default;
};

/// Forward pass over every state row, OpenMP-parallel over rows.
ActivationTrace forward(const NetworkSpec& net, const StateTable& states);
/// Serial reference kernel; bit-identical to `forward`.
ActivationTrace forward_reference(const NetworkSpec& net, const StateTable& states);

/// Bit j set iff activation(neuron, j) > beta.
BitVector binarize(const ActivationTrace& trace, const NeuronRef& neuron, double beta = 0.0);

/// Influence of a hidden neuron on each output. Exact output-layer column for the last hidden
/// layer; for earlier layers, the product of downstream weight matrices with nonlinearities ignored.
std::vector<double> output_weights(const NetworkSpec& net, const NeuronRef& neuron);

/// Index of the largest output (first on ties).
std::size_t argmax_action(std::span<const double> outputs);

}  // namespace ccprobe
