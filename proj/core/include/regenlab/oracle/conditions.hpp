#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/oracle/events.hpp"

namespace regenlab::oracle {

struct ConditionWitness {
  std::string condition;  // "monotonicity", "future_restriction" or "past_restriction"
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<int> first;  // xi_1..xi_{n+m+L}
  std::vector<int> second;
  bool first_value = false;
  bool second_value = false;

  nlohmann::json to_json() const;
};

struct ConditionVerdict {
  bool pass = true;
  std::vector<std::int64_t> failing_m;
  std::vector<ConditionWitness> witnesses;  // first witness per failing (condition, m)

  nlohmann::json to_json() const;
};

// Restricted to F_m, the indicator of F_0 must be a function of xi_1..xi_m,
// for every m in [min_m, max_m]. The restriction method decides existence of
// E'_{0,m} constructively.
ConditionVerdict check_monotonicity(const RationalAlphabet& alphabet, const TruncatedFuture& f, int max_m,
                                   int min_m = 1);

// Future restriction: on H_n and A_{n+m}, F_n is a function of
// xi_{n+1}..xi_{n+m}, the same function for every n in 0..n_max.
// Past restriction: on A_n, H_{n+m} is such a function.
ConditionVerdict check_restriction_conditions(const RationalAlphabet& alphabet, const TruncatedPast& h,
                                              const TruncatedFuture& f, int max_m, int n_max = 2, int min_m = 1);

}  // namespace regenlab::oracle
