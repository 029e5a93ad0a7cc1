#include "regenlab/regen/cycle_law.hpp"

#include <cmath>

#include "regenlab/errors.hpp"
#include "regenlab/stats/estimators.hpp"

namespace regenlab::regen {

nlohmann::json CycleLaw::to_json() const {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [n, pmf] : gap_pmf) {
    if (n > n_max) break;
    nlohmann::json row{{"n", n}, {"gap_pmf", pmf}, {"count", gap_counts.at(n)}};
    if (auto it = e_prob.find(n); it != e_prob.end()) row["e_prob"] = it->second;
    if (auto it = ratio.find(n); it != ratio.end()) row["ratio"] = it->second;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["a_hat"] = a_hat;
  j["a_ci"] = {a_lo, a_hi};
  j["n_max"] = n_max;
  j["flatness"] = flatness.to_json();
  return j;
}

CycleLaw cycle_law(const std::vector<Cycle>& cycles, const EProbability& e_prob, std::int64_t n_max, double alpha) {
  if (cycles.size() < kMinCyclesForLaw) throw DomainError("cycle_law: need at least 100 cycles");
  if (n_max < 1) throw DomainError("cycle_law: n_max must be >= 1");
  CycleLaw law;
  law.n_max = n_max;
  for (const auto& c : cycles) ++law.gap_counts[c.gap()];
  const double m = static_cast<double>(cycles.size());
  for (const auto& [n, c] : law.gap_counts) law.gap_pmf[n] = static_cast<double>(c) / m;

  double e_sum = 0.0;
  double covered = 0.0;
  std::vector<double> counts, probs;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double e = e_prob(n);
    law.e_prob[n] = e;
    auto it = law.gap_counts.find(n);
    const double c = it == law.gap_counts.end() ? 0.0 : static_cast<double>(it->second);
    if (e <= 0.0 && c > 0.0)
      throw InconsistencyError("cycle_law: gap " + std::to_string(n) + " observed but Pr(E_{0,n}) = 0");
    if (e > 0.0) law.ratio[n] = c / m / e;
    e_sum += e;
    covered += c;
    counts.push_back(c);
    probs.push_back(e);
  }
  if (!(e_sum > 0.0)) throw InconsistencyError("cycle_law: Pr(E_{0,n}) vanishes on 1..n_max");
  const double s = covered / m;
  law.a_hat = s / e_sum;
  const double se = std::sqrt(s * (1.0 - s) / m) / e_sum;
  const double z = stats::normal_quantile(0.975);
  law.a_lo = law.a_hat - z * se;
  law.a_hi = law.a_hat + z * se;
  for (auto& p : probs) p /= e_sum;
  law.flatness = stats::chi_square_gof(counts, probs, alpha);
  law.flatness.name = "gap_flatness";
  return law;
}

}  // namespace regenlab::regen
