#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccprobe/matcher.hpp"

namespace ccprobe {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitBudget = 4,
};

/// Shared settings of every pipeline subcommand. Exactly one state source and one library source.
struct RunConfig {
  std::string network_path;
  std::string library_source;  // "builtin:<name>" or path
  std::optional<std::string> states_path;
  std::optional<std::size_t> synth_count;
  std::uint64_t seed = 0;
  std::size_t layer = 2;
  MatchConfig match;
  std::string output_dir = ".";
  std::string run_id;
  int threads = 0;  // 0: runtime default
  std::vector<std::string> formats{"json", "md"};

  void validate() const;
};

/// Entry point behind the `ccprobe` binary. Never throws; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccprobe
