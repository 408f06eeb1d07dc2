#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccprobe/matcher.hpp"
#include "ccprobe/perturb.hpp"

namespace ccprobe {

/// Deterministic description of a run: everything needed to reproduce it, nothing that varies
/// between otherwise identical runs (wall time and thread count live in the run manifest file).
struct Manifest {
  std::string run_id;
  std::string tool_version;
  std::string network_source;
  std::string network_sha256;
  std::vector<std::size_t> hidden_widths;
  std::vector<std::string> action_labels;
  OutputKind output_kind = OutputKind::action_values;
  std::string library_name;
  std::string library_source;
  std::string library_sha256;
  std::vector<std::string> dimensions;
  std::string state_source;
  std::string states_sha256;
  std::size_t state_count = 0;
  std::optional<std::uint64_t> seed;
  std::size_t layer = 2;
  MatchConfig config;
};

struct ReportBundle {
  Manifest manifest;
  std::vector<MatchResult> results;
  std::vector<std::vector<double>> result_weights;  // parallel to results, one entry per action
  std::vector<PerturbationCase> cases;
  std::vector<std::vector<double>> case_weights;  // parallel to cases
};

/// Throws (data) when a result or case names a neuron outside the manifest's network.
void validate_bundle(const ReportBundle& bundle);

/// Pipe tables: matches (neuron, Jaccard to 2 decimals, length, formula, one weight column per action),
/// sorted by descending Jaccard; then perturbation cases when present.
std::string render_markdown(const ReportBundle& bundle);

/// Canonical JSON with full-precision numbers; load_bundle(render_json(b)) renders identically.
std::string render_json(const ReportBundle& bundle);
ReportBundle load_bundle(std::string_view json_text);
/// Merges the results of one bundle and the cases of another (same run).
ReportBundle merge_bundles(const ReportBundle& matches, const ReportBundle& cases);

}  // namespace ccprobe
