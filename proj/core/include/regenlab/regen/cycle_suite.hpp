#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/regen/scanner.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"

namespace regenlab::regen {

// Per-cycle summaries: the gap, the last trace value (the increment of a
// relative trace) and the largest trace value.
enum class CycleFeature : std::uint8_t { kGap, kIncrement, kMax };

std::string to_string(CycleFeature f);
std::vector<double> cycle_feature(const std::vector<Cycle>& cycles, CycleFeature f);

struct FeatureCheck {
  CycleFeature feature = CycleFeature::kGap;
  stats::TestReport half_vs_half;  // KS between the first and second half
  stats::TestReport adjacent;      // permutation test of (f_k, f_{k+1})
  bool pass = false;
  nlohmann::json to_json() const;
};

struct CycleSuiteConfig {
  std::vector<CycleFeature> features{CycleFeature::kGap, CycleFeature::kIncrement, CycleFeature::kMax};
  double alpha = 0.01;
  bool bonferroni = true;  // alpha / number of features per test
  int permutations = 999;
  std::uint64_t seed = 0;
  std::size_t min_cycles = 60;
};

struct CycleSuiteReport {
  std::size_t cycles = 0;
  double alpha_per_test = 0.0;
  std::vector<FeatureCheck> checks;
  std::optional<stats::TailFit> gap_tail;
  std::string diagnostic;
  bool tests_pass = false;  // every KS and permutation test fails to reject
  bool tail_pass() const noexcept { return gap_tail.has_value() && gap_tail->rate > 0.0; }
  nlohmann::json to_json() const;
};

CycleSuiteReport cycle_suite(const std::vector<Cycle>& cycles, const CycleSuiteConfig& cfg = {});

}  // namespace regenlab::regen
