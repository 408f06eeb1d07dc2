// Regenerates the committed fixture networks:
//   blackjack.net    hand-wired logic network over (player_sum, dealer_card, usable_ace)
//   lunarlander.net  random ReLU network of LunarLander shape (8 -> 64 -> 64 -> 64 -> 4)
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "ccprobe/network.hpp"

namespace {

using ccprobe::Activation;
using ccprobe::DenseLayer;
using ccprobe::Matrix;

DenseLayer make_layer(std::size_t out, std::size_t in, Activation act, double bias = 0.0) {
  DenseLayer l;
  l.weights = Matrix(out, in);
  l.biases.assign(out, bias);
  l.activation = act;
  return l;
}

// Unit pairs relu(x - k + 1) - relu(x - k) form the step [x >= k] on integer inputs.
ccprobe::NetworkSpec blackjack() {
  constexpr std::size_t kSum = 0, kDealer = 1, kAce = 2;
  DenseLayer h1 = make_layer(16, 3, Activation::relu, -1.0);  // unused units stay dead
  auto ramp = [&](std::size_t unit, std::size_t input, double offset) {
    h1.weights(unit, input) = 1.0;
    h1.biases[unit] = -offset;
  };
  ramp(0, kSum, 16);    // [sum >= 17] = u0 - u1
  ramp(1, kSum, 17);
  ramp(2, kSum, 5);     // [sum >= 6] = u2 - u3
  ramp(3, kSum, 6);
  ramp(4, kSum, 10);    // [sum >= 11] = u4 - u5
  ramp(5, kSum, 11);
  ramp(6, kDealer, 6);  // [dealer >= 7] = u6 - u7
  ramp(7, kDealer, 7);
  ramp(8, kAce, 0);     // usable ace

  // tanh units: +tanh(2) when the planted condition holds, -tanh(2) otherwise.
  DenseLayer h2 = make_layer(8, 16, Activation::tanh, -1.0);
  h2.weights(0, 0) = 4, h2.weights(0, 1) = -4, h2.biases[0] = -2;  // sum >= 17
  h2.weights(1, 2) = 4, h2.weights(1, 3) = -4;                      // 6 <= sum <= 10
  h2.weights(1, 4) = -4, h2.weights(1, 5) = 4, h2.biases[1] = -2;
  h2.weights(2, 6) = 4, h2.weights(2, 7) = -4, h2.biases[2] = -2;  // dealer >= 7
  h2.weights(3, 8) = 4, h2.biases[3] = -2;                          // usable ace
  h2.weights(4, 0) = 4, h2.weights(4, 1) = -4, h2.weights(4, 8) = 4, h2.biases[4] = -6;  // sum >= 17 and ace
  // units 5..7 never fire

  DenseLayer h3 = make_layer(8, 8, Activation::relu);
  for (std::size_t i = 0; i < 8; ++i) h3.weights(i, i) = 1.0;

  DenseLayer out = make_layer(2, 8, Activation::identity);
  out.weights(0, 0) = 2.0, out.weights(0, 2) = -0.5;  // stick
  out.weights(1, 1) = 1.0, out.biases[1] = 0.5;       // hit
  return ccprobe::NetworkSpec({h1, h2, h3, out}, ccprobe::OutputKind::action_values, {"stick", "hit"});
}

ccprobe::NetworkSpec lunarlander(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t widths[] = {8, 64, 64, 64, 4};
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < std::size(widths); ++l) {
    const bool last = l + 2 == std::size(widths);
    DenseLayer layer = make_layer(widths[l + 1], widths[l], last ? Activation::identity : Activation::relu);
    std::normal_distribution<double> w(0.0, std::sqrt(2.0 / static_cast<double>(widths[l])));
    std::normal_distribution<double> b(0.0, 0.1);
    for (double& v : layer.weights.data) v = w(rng);
    for (double& v : layer.biases) v = b(rng);
    layers.push_back(std::move(layer));
  }
  return ccprobe::NetworkSpec(std::move(layers), ccprobe::OutputKind::action_values,
                              {"noop", "fire_left", "fire_main", "fire_right"});
}

void write(const std::filesystem::path& path, const ccprobe::NetworkSpec& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ccprobe::save_network(net);
  std::cout << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  try {
    std::filesystem::create_directories(dir);
    write(dir / "blackjack.net", blackjack());
    write(dir / "lunarlander.net", lunarlander(20240601));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
