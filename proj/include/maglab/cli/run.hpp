#pragma once

#include <string>

#include "maglab/cli/config.hpp"
#include "maglab/cli/table.hpp"

namespace maglab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< verify violation, I/O failure or other runtime error
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitEmptyDomain = 4;

/// Name of the environment variable holding the worker count.
inline constexpr const char* kWorkersEnv = "MAGLAB_WORKERS";

/// Worker count from the environment; 1 (serial) when unset or invalid.
int workers_from_env();

std::string artifact_version();

struct RunResult {
  int exit_code = kExitOk;
  ResultTable table;
  std::string metadata;  ///< JSON sidecar document
  std::string summary;   ///< human-readable report, one item per line
};

/// Columns written by each subcommand, in order.
std::vector<std::string> columns_for(const Command& c);

/// Executes the configured subcommand and writes the requested outputs.
/// Errors are mapped to exit codes instead of propagating.
RunResult run(const RunConfig& config, int workers = 1);

}  // namespace maglab::cli
