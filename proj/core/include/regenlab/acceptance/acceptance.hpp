#pragma once

// End-to-end acceptance checks, one per numbered criterion. Each returns a
// verdict plus a JSON detail block with every measured quantity, so a FAIL
// is always accompanied by the numbers behind it.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenlab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  nlohmann::json detail = nlohmann::json::object();
  std::string note;

  // "[PASS] 3 walk occurrence density (1.2 s): ..." style single line.
  std::string line() const;
  nlohmann::json to_json() const;
};

struct AcceptanceOptions {
  std::vector<int> criteria;  // empty: all
  std::uint64_t seed = 2026;
  // Extra regimes reported next to a criterion whose stated regime fails.
  bool supplementary = true;
};

const std::vector<int>& all_criteria();
std::string criterion_title(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);
nlohmann::json acceptance_summary(const std::vector<CriterionResult>& results);

}  // namespace regenlab::acceptance
