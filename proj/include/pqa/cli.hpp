#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "pqa/dataset.hpp"

namespace pqa {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitGeneration = 3,
  kExitViolations = 4,
  kExitDisqualified = 5,
};

// Generation settings from a JSON config; relative paths resolve against
// `base_dir`. Throws ConfigError.
GenerationConfig load_generation_config(std::string_view json_text, const std::string& base_dir = ".");

std::string sha256_hex(std::string_view data);

// Manifest for a generated dataset; byte-stable for equal inputs.
std::string generation_manifest(const GenerationConfig& config, const GeneratedDataset& ds,
                                const std::string& dataset_text);

// Entry point of the `pqa` tool: generate, validate, stats, score, serve,
// evaluate. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pqa
