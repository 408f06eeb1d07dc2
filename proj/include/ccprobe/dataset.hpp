#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccprobe/network.hpp"
#include "ccprobe/state_table.hpp"

namespace ccprobe {

enum class StateFormat { csv, jsonl };

/// CSV needs a header of dimension names (any order); JSON-lines holds one object per state.
StateTable parse_states(std::string_view text, const StateSchema& schema, StateFormat format,
                        std::string provenance = "memory");
/// Format chosen from the extension (.jsonl/.ndjson) or, failing that, from the first character.
StateTable load_states(const std::string& path, const StateSchema& schema);

std::string format_states(const StateTable& states, StateFormat format);
void save_states(const StateTable& states, const std::string& path);

/// Uniform sampling within bounds: continuous uniform, discrete uniform over integers, binary fair coin.
StateTable sample_states(const StateSchema& schema, std::size_t n, std::uint64_t seed);

/// Neurons of `layer` whose firing fraction (activation > beta) strictly exceeds `min_frac`.
std::vector<NeuronRef> active_neurons(const ActivationTrace& trace, std::size_t layer, double beta = 0.0,
                                      double min_frac = 0.05);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace ccprobe
