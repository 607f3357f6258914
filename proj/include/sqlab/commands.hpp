#pragma once

// CLI command execution: load a config, run the pipeline, write the report
// artifacts plus a manifest with content digests.
//
// exit-code contract: 0 success, 2 config/validation error, 3 numeric or
// runtime failure. report files are byte-identical for identical
// (config, seed); wall-clock data lives only in the manifest.

#include <cstdint>
#include <optional>
#include <string>

namespace sqlab {

struct CliOptions {
  std::string config_path;
  std::string out_dir;  // overrides the config output path when nonempty
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  unsigned max_threads = 0;  // 0 = hardware concurrency; capped by caller
};

int run_command(const std::string& pipeline, const CliOptions& options);

// 17-significant-digit float formatting shared by all artifacts
std::string format_double(double value);

std::string sha256_hex(const std::string& bytes);

}  // namespace sqlab
