#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/regen/scanner.hpp"
#include "regenlab/stats/tests.hpp"

namespace regenlab::regen {

struct CycleLaw {
  std::map<std::int64_t, double> gap_pmf;
  std::map<std::int64_t, std::int64_t> gap_counts;
  std::map<std::int64_t, double> e_prob;
  std::map<std::int64_t, double> ratio;  // gap_pmf(n) / e_prob(n)
  double a_hat = 0.0;
  double a_lo = 0.0;
  double a_hi = 0.0;
  std::int64_t n_max = 0;  // ratios and the flatness test use n <= n_max
  stats::TestReport flatness;

  nlohmann::json to_json() const;
};

// Estimator of Pr(E_{0,n}) for n >= 1.
using EProbability = std::function<double(std::int64_t n)>;

inline constexpr std::size_t kMinCyclesForLaw = 100;

// gap_pmf(n) = a Pr(E_{0,n}). a is estimated over n <= n_max as
// (fraction of gaps <= n_max) / sum_{n<=n_max} Pr(E_{0,n}); flatness is a
// chi-square test of gap counts against a_hat Pr(E_{0,n}).
CycleLaw cycle_law(const std::vector<Cycle>& cycles, const EProbability& e_prob, std::int64_t n_max,
                   double alpha = 0.01);

}  // namespace regenlab::regen
