#include "regenlab/regen/cycle_suite.hpp"

#include <algorithm>
#include <span>

#include "regenlab/errors.hpp"

namespace regenlab::regen {

std::string to_string(CycleFeature f) {
  switch (f) {
    case CycleFeature::kGap: return "gap";
    case CycleFeature::kIncrement: return "increment";
    case CycleFeature::kMax: return "max";
  }
  return "?";
}

std::vector<double> cycle_feature(const std::vector<Cycle>& cycles, CycleFeature f) {
  std::vector<double> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) {
    if (f == CycleFeature::kGap) {
      out.push_back(static_cast<double>(c.gap()));
    } else if (c.trace.empty()) {
      throw DomainError("cycle_feature: cycle " + std::to_string(c.k) + " has no trace");
    } else if (f == CycleFeature::kIncrement) {
      out.push_back(c.trace.back());
    } else {
      out.push_back(*std::max_element(c.trace.begin(), c.trace.end()));
    }
  }
  return out;
}

nlohmann::json FeatureCheck::to_json() const {
  return {{"feature", to_string(feature)},
          {"half_vs_half", half_vs_half.to_json()},
          {"adjacent", adjacent.to_json()},
          {"pass", pass}};
}

nlohmann::json CycleSuiteReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  nlohmann::json j{{"cycles", cycles},           {"alpha_per_test", alpha_per_test}, {"checks", checks_json},
                   {"tests_pass", tests_pass},   {"tail_pass", tail_pass()}};
  j["gap_tail"] = gap_tail ? gap_tail->to_json() : nlohmann::json(nullptr);
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

CycleSuiteReport cycle_suite(const std::vector<Cycle>& cycles, const CycleSuiteConfig& cfg) {
  if (cfg.features.empty()) throw ConfigError("cycle_suite: no features");
  CycleSuiteReport rep;
  rep.cycles = cycles.size();
  rep.alpha_per_test = cfg.bonferroni ? cfg.alpha / static_cast<double>(cfg.features.size()) : cfg.alpha;
  if (cycles.size() < std::max<std::size_t>(cfg.min_cycles, 60)) {
    rep.diagnostic = "too few cycles (" + std::to_string(cycles.size()) + ")";
    return rep;
  }
  rep.tests_pass = true;
  const std::size_t half = cycles.size() / 2;
  for (std::size_t i = 0; i < cfg.features.size(); ++i) {
    const auto v = cycle_feature(cycles, cfg.features[i]);
    const std::span<const double> s(v);
    FeatureCheck c;
    c.feature = cfg.features[i];
    c.half_vs_half = stats::ks_two_sample(s.first(half), s.subspan(half), rep.alpha_per_test);
    c.adjacent = stats::permutation_independence(s.first(v.size() - 1), s.subspan(1), cfg.permutations,
                                                 cfg.seed + i, rep.alpha_per_test);
    c.pass = !c.half_vs_half.reject && !c.adjacent.reject;
    rep.tests_pass = rep.tests_pass && c.pass;
    rep.checks.push_back(std::move(c));
  }
  std::vector<std::int64_t> gaps;
  gaps.reserve(cycles.size());
  for (const auto& c : cycles) gaps.push_back(c.gap());
  try {
    rep.gap_tail = stats::geometric_tail_fit(gaps);
  } catch (const FitError& e) {
    rep.diagnostic = std::string("gap tail: ") + e.what();
  }
  return rep;
}

}  // namespace regenlab::regen
