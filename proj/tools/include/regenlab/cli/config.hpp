#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/bins/bins.hpp"
#include "regenlab/contact/contact.hpp"
#include "regenlab/core/law.hpp"
#include "regenlab/harris/harris.hpp"
#include "regenlab/regen/scanner.hpp"

namespace regenlab::cli {

inline constexpr int kSchemaVersion = 1;

struct WalkParams {
  core::Law law = core::Alphabet::skip_free_walk(0.4, 0.2);
  std::string past = "always";     // always | strict_record
  std::string future = "weak";     // weak | strict | weak_next_zero
};

struct Contact2Params {
  contact::DescendantLaw law = contact::DescendantLaw::independent(0.75);
};

struct Contact3Params {
  contact::DescendantLaw law = contact::DescendantLaw::independent(0.9);
  double q = 0.8;
  std::int64_t window = 0;  // 0: max(2 horizon + 2, 4096)
};

struct BinsBasicParams {
  core::Law law = core::GeometricLaw{0.5};
  std::int64_t depth = 0;
  std::vector<std::int64_t> initial{1};
};

struct BinsPrimeParams {
  std::int64_t i1 = 2;
  std::int64_t i2 = 3;
  std::vector<double> weights{0.5, 0.5};
  std::int64_t depth = 0;
  std::int64_t max_word_length = 20;
  std::vector<std::int64_t> initial{1};
};

struct LinksParams {
  double p = 0.5;
  double mean_length = 1.0;
  double epsilon = 0.5;
  std::int64_t blocks = 64;
  std::int64_t depth = 1;
  std::int64_t calibration_steps = 200000;
};

struct HarrisParams {
  harris::ChainSpec chain{};
  double x0 = 2.0;
  bool tv = true;
  std::vector<double> tv_inits{0.0, 2.0};
  std::vector<std::int64_t> tv_steps{5, 20, 100};
  std::int64_t tv_replicas = 100000;
  int tv_bins = 64;
  harris::ReplicaCoupling tv_coupling = harris::ReplicaCoupling::kCommon;
};

struct AcceptanceParams {
  std::vector<int> criteria;  // empty: all
  bool supplementary = true;
};

using ProcessParams = std::variant<WalkParams, Contact2Params, Contact3Params, BinsBasicParams, BinsPrimeParams,
                                   LinksParams, HarrisParams, AcceptanceParams>;

// "walk", "contact2", "contact3", "bins-basic", "bins-prime", "links",
// "harris", "acceptance".
std::string process_name(const ProcessParams& p);
const std::vector<std::string>& process_names();

struct ScannerSection {
  std::int64_t horizon = 1000;
  std::int64_t min_separation = 1;
  std::int64_t N = 10000;
  regen::UndecidedPolicy policy = regen::UndecidedPolicy::kTruncate;
  std::int64_t escalation_cap = std::int64_t{1} << 20;

  regen::BreakConfig break_config() const;
};

struct VerificationSection {
  // cycle_suite | speed | survival
  std::vector<std::string> suites;
  double alpha = 0.01;
  int permutations = 999;
};

struct OutputSection {
  std::string dir;  // empty: regenlab-out/<name>
  bool cycles = true;
};

// Exact enumeration over a finite rational alphabet.
struct OracleSection {
  nlohmann::json alphabet;  // {"symbols": [...], "weights": ["1/4", ...]}
  std::string past = "always";
  int past_k = 0;
  std::string future = "walk_weak";
  int lookahead = 6;
  int T = 6;
  int min_separation = 1;
  int max_m = 6;
  // Reports P(xi_{tau_1 + 1} = symbol | gap) when set.
  std::optional<std::pair<int, int>> witness;
  std::int64_t cross_check_N = 0;  // 0: no simulation cross-check
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name = "experiment";
  std::string description;
  ProcessParams process = WalkParams{};
  ScannerSection scanner{};
  VerificationSection verification{};
  std::vector<std::uint64_t> seeds{1};
  OutputSection output{};
  std::optional<OracleSection> oracle;

  // Every field with defaults filled in; parse_config(canonical()) is the
  // identity.
  nlohmann::json canonical() const;
};

// All schema violations are collected and raised together as one
// ConfigError, one per line, each prefixed with its JSON path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
// Empty when the file is a valid configuration.
std::vector<std::string> validate_config_file(const std::filesystem::path& path);

// "a..b" (inclusive), "a,b,c" or a single integer.
std::vector<std::uint64_t> parse_seed_list(const std::string& s);
// "geometric:0.5", "exponential:1", "uniform:0:1", "walk:0.4:0.2" or a JSON
// law object.
core::Law parse_law_spec(const std::string& s);

}  // namespace regenlab::cli
