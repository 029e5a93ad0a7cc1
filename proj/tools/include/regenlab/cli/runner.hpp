#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/cli/config.hpp"

namespace regenlab::cli {

std::string tool_version();

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string contents;
};

struct RunResult {
  nlohmann::json summary;
  std::vector<OutputFile> files;  // summary.json and manifest.json excluded
  bool verification_pass = true;  // every requested suite passed
  bool acceptance_failed = false;
  std::vector<std::string> report;  // human-readable lines for stdout
};

// Runs every seed of the experiment. Nothing touches the filesystem.
RunResult run_experiment(const ExperimentConfig& cfg);

// Writes the files plus summary.json and manifest.json. The manifest lists
// every file with its size and SHA-256; no timestamps are recorded, so two
// runs of the same configuration produce identical directories.
std::filesystem::path write_outputs(const ExperimentConfig& cfg, const RunResult& result,
                                    const std::filesystem::path& dir = {});

// Exact law from the oracle section, plus a simulation cross-check of the
// gap law when cross_check_N > 0.
nlohmann::json run_oracle(const OracleSection& o, std::uint64_t seed);

struct PresetInfo {
  std::string file;
  std::string name;
  std::string process;
  std::string description;
};

// Every *.json in the directory that parses as a configuration, sorted by
// file name. Invalid files are reported with the error as description.
std::vector<PresetInfo> list_presets(const std::filesystem::path& dir);

// REGENLAB_PRESET_DIR from the environment, else the installed share
// directory, else the source tree presets.
std::filesystem::path default_preset_dir();

}  // namespace regenlab::cli
