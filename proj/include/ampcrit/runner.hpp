#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ampcrit {

struct RunnerOptions {
  std::string subcommand;  // simulate | mu | critical | slope | scan | verify
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides [run] seed
  std::string out_dir;                // overrides [run] output_dir
  std::vector<std::string> overrides; // section.key=value
};

// Exit codes: 0 success, 1 failed check or runtime error, 2 config/usage error.
int run_subcommand(const RunnerOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace ampcrit
