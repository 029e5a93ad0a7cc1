#include <algorithm>
#include <limits>
#include <sstream>

#include "regenlab/contact/contact.hpp"
#include "regenlab/errors.hpp"

namespace regenlab::contact {

namespace {

class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}
  // Uniform on [lo, hi] for attempt a, draw k.
  std::int64_t uniform(std::int64_t a, std::uint32_t k, std::int64_t lo, std::int64_t hi) const {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(rng_.word(a, k, core::Tag::kReplica) % span);
  }

 private:
  core::CounterRng rng_;
};

constexpr std::int64_t kBaseRange = 1'000'000;

void violation(ReplayReport& rep, const std::string& what) {
  if (rep.violations++ == 0) rep.first_violation = what;
}

std::vector<double> cumulative_increments(const ContactScan& scan) {
  std::vector<double> cum{0.0};
  for (double v : scan.increments) cum.push_back(cum.back() + v);
  return cum;
}

void require_cycles(const ContactScan& scan, const char* who) {
  if (scan.scan.cycles.empty()) throw DomainError(std::string(who) + ": the scan has no complete cycle");
}

template <class ProbeFn>
ReplayReport replay_cocycle(const char* name, std::int64_t triples, std::int64_t T, std::uint64_t seed,
                            bool require_record, ProbeFn probe) {
  if (triples < 1 || T < 2) throw ConfigError(std::string(name) + ": need triples >= 1 and T >= 2");
  ReplayReport rep;
  rep.identity = name;
  const Picker pick(seed);
  const std::int64_t max_attempts = triples * 1000;
  for (std::int64_t a = 0; a < max_attempts && rep.checks < triples; ++a) {
    const std::int64_t n = pick.uniform(a, 0, 0, kBaseRange);
    const std::int64_t m = pick.uniform(a, 1, 1, T / 2);
    const std::int64_t n2 = pick.uniform(a, 2, 1, T / 2);
    const auto p1 = probe(n, m + n2);
    if (static_cast<std::int64_t>(p1.path.size()) <= m) continue;
    const auto pm = p1.path[static_cast<std::size_t>(m)];
    if (require_record && *std::max_element(p1.path.begin(), p1.path.begin() + m + 1) > pm) continue;
    const auto p2 = probe(n + m, n2);
    if (static_cast<std::int64_t>(p2.path.size()) <= n2) continue;
    ++rep.checks;
    std::ostringstream where;
    where << "n=" << n << " m=" << m << " n'=" << n2;
    if (static_cast<std::int64_t>(p1.path.size()) <= m + n2) {
      violation(rep, where.str() + ": X^(n) died while X^(n+m) survived");
    } else if (p1.path[static_cast<std::size_t>(m + n2)] != pm + p2.path[static_cast<std::size_t>(n2)]) {
      violation(rep, where.str() + ": right endpoints differ");
    }
  }
  return rep;
}

// Checks r_{tau_k + n'} = r_{tau_0} + sum_{j<k} inc_j + trace_k(n') on
// random (k, n'), for every pair whose time is covered by `path`.
void check_cycle_sum(ReplayReport& rep, const ContactScan& scan, const std::vector<std::int64_t>& path,
                     std::int64_t checks, const Picker& pick, std::uint32_t lane) {
  const auto& cycles = scan.scan.cycles;
  const auto cum = cumulative_increments(scan);
  const std::int64_t tau0 = scan.scan.taus.front();
  if (static_cast<std::int64_t>(path.size()) <= tau0) return;
  const auto r0 = static_cast<double>(path[static_cast<std::size_t>(tau0)]);
  for (std::int64_t a = 0; a < checks; ++a) {
    const auto k = static_cast<std::size_t>(pick.uniform(a, lane, 0, static_cast<std::int64_t>(cycles.size()) - 1));
    const auto& c = cycles[k];
    const std::int64_t i = pick.uniform(a, lane + 1, 1, c.gap());
    const std::int64_t t = c.tau_start + i;
    if (t >= static_cast<std::int64_t>(path.size())) continue;
    ++rep.checks;
    const double expect = r0 + cum[k] + c.trace[static_cast<std::size_t>(i - 1)];
    if (static_cast<double>(path[static_cast<std::size_t>(t)]) != expect) {
      std::ostringstream where;
      where << "k=" << k << " n'=" << i << ": r=" << path[static_cast<std::size_t>(t)] << " expected " << expect;
      violation(rep, where.str());
    }
  }
}

}  // namespace

ReplayReport replay_cocycle_two_state(const ContactDriving& d, std::int64_t triples, std::int64_t T,
                                      std::uint64_t seed) {
  return replay_cocycle("cocycle_two_state", triples, T, seed, false,
                        [&](std::int64_t n, std::int64_t h) { return survival_probe2(d, n, h, true); });
}

ReplayReport replay_coupling_two_state(const ContactDriving& d, std::int64_t trials, std::int64_t T, std::uint64_t seed) {
  if (trials < 1 || T < 1) throw ConfigError("replay_coupling_two_state: need trials >= 1 and T >= 1");
  ReplayReport rep;
  rep.identity = "coupling_two_state";
  const Picker pick(seed);
  for (std::int64_t a = 0; a < trials; ++a) {
    const std::int64_t n = pick.uniform(a, 0, 0, kBaseRange);
    const std::int64_t width = pick.uniform(a, 1, 1, 64);
    const auto mask = static_cast<std::uint64_t>(pick.uniform(a, 2, 0, std::numeric_limits<std::int64_t>::max() - 1));
    std::vector<std::int64_t> sites{0};
    for (std::int64_t i = 1; i <= width; ++i)
      if ((mask >> (i - 1)) & 1u) sites.push_back(-2 * i);
    auto x = LatticeConfig2::single_site(0);
    auto xh = LatticeConfig2::from_sites(sites);
    ++rep.checks;
    for (std::int64_t lag = 1; lag <= T; ++lag) {
      step2_inplace(x, d, n + lag - 1);
      if (x.extinct()) break;
      step2_inplace(xh, d, n + lag - 1);
      bool ok = !xh.extinct() && xh.r == x.r;
      if (ok)
        for (auto s : x.sites()) ok = ok && xh.contains(s);
      if (!ok) {
        violation(rep, "n=" + std::to_string(n) + " lag=" + std::to_string(lag));
        break;
      }
    }
  }
  return rep;
}

ReplayReport replay_cycle_sum_two_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                        std::uint64_t seed) {
  require_cycles(scan, "replay_cycle_sum_two_state");
  ReplayReport rep;
  rep.identity = "cycle_sum_two_state";
  const std::int64_t end = scan.scan.taus.back();
  std::vector<std::int64_t> path;
  // X_0 = {0} first; a wide start when {0} dies before tau_0.
  for (std::int64_t width : {1, 256}) {
    std::vector<std::int64_t> sites;
    for (std::int64_t i = 0; i < width; ++i) sites.push_back(-2 * i);
    auto x = LatticeConfig2::from_sites(sites);
    path.assign(1, x.r);
    for (std::int64_t t = 0; t < end; ++t) {
      step2_inplace(x, d, t);
      if (x.extinct()) break;
      path.push_back(x.r);
    }
    if (static_cast<std::int64_t>(path.size()) > scan.scan.taus.front()) break;
  }
  check_cycle_sum(rep, scan, path, checks, Picker(seed), 0);
  return rep;
}

ReplayReport replay_coupling_three_state(const ContactDriving& d, std::int64_t trials, std::int64_t T,
                                         std::uint64_t seed) {
  if (trials < 1 || T < 1) throw ConfigError("replay_coupling_three_state: need trials >= 1 and T >= 1");
  ReplayReport rep;
  rep.identity = "coupling_three_state";
  const Picker pick(seed);
  for (std::int64_t a = 0; a < trials; ++a) {
    const std::int64_t n = pick.uniform(a, 0, 0, kBaseRange);
    const std::int64_t width = pick.uniform(a, 1, 1, 64);
    std::vector<std::int8_t> left(static_cast<std::size_t>(width + 1));
    for (std::int64_t i = 0; i < width; ++i) {
      const std::int64_t x = -width + i;
      const auto u = pick.uniform(a, static_cast<std::uint32_t>(2 + i), 0, 2);
      left[static_cast<std::size_t>(i)] = (x & 1) ? static_cast<std::int8_t>(-(u & 1)) : static_cast<std::int8_t>(u - 1);
    }
    left.back() = 1;
    auto x = LatticeConfig3::single_site();
    auto xh = LatticeConfig3::from_states(-width, left);
    ++rep.checks;
    for (std::int64_t lag = 1; lag <= T; ++lag) {
      step3_inplace(x, d, n + lag - 1);
      if (x.extinct) break;
      step3_inplace(xh, d, n + lag - 1);
      bool ok = !xh.extinct && xh.r == x.r;
      for (std::int64_t y = x.leftmost(); ok && y <= x.hi() + 1; ++y) ok = xh.at(y) == x.at(y);
      if (!ok) {
        violation(rep, "n=" + std::to_string(n) + " lag=" + std::to_string(lag));
        break;
      }
    }
  }
  return rep;
}

ReplayReport replay_cocycle_three_state(const ContactDriving& d, std::int64_t triples, std::int64_t T,
                                        std::uint64_t seed) {
  return replay_cocycle("cocycle_three_state", triples, T, seed, true,
                        [&](std::int64_t n, std::int64_t h) { return survival_probe3(d, n, h, true); });
}

ReplayReport replay_record_shift_three_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                             std::int64_t T, std::uint64_t seed) {
  const auto& rbar = scan.rbar;
  if (rbar.size() < 2) throw DomainError("replay_record_shift_three_state: the scan has no Z_- path");
  std::vector<std::int64_t> records;
  std::int64_t best = rbar.front();
  for (std::size_t n = 0; n + 1 < rbar.size(); ++n) {
    if (rbar[n] >= best) records.push_back(static_cast<std::int64_t>(n));
    best = std::max(best, rbar[n]);
  }
  ReplayReport rep;
  rep.identity = "record_shift_three_state";
  const Picker pick(seed);
  const auto last = static_cast<std::int64_t>(rbar.size()) - 1;
  for (std::int64_t a = 0; a < checks; ++a) {
    const std::int64_t n =
        records[static_cast<std::size_t>(pick.uniform(a, 0, 0, static_cast<std::int64_t>(records.size()) - 1))];
    const auto p = survival_probe3(d, n, std::min(T, last - n), true);
    ++rep.checks;
    for (std::size_t i = 0; i < p.path.size(); ++i) {
      if (rbar[static_cast<std::size_t>(n) + i] != rbar[static_cast<std::size_t>(n)] + p.path[i]) {
        violation(rep, "n=" + std::to_string(n) + " lag=" + std::to_string(i));
        break;
      }
    }
  }
  return rep;
}

ReplayReport replay_cycle_sum_three_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                          std::uint64_t seed) {
  require_cycles(scan, "replay_cycle_sum_three_state");
  ReplayReport rep;
  rep.identity = "cycle_sum_three_state";
  const Picker pick(seed);
  check_cycle_sum(rep, scan, scan.rbar, checks, pick, 0);

  const std::int64_t end = scan.scan.taus.back();
  const std::int64_t window = std::max<std::int64_t>(2 * scan.scan.horizon + 2, 4096);
  auto x = LatticeConfig3::single_site();
  std::vector<std::int64_t> path{x.r};
  for (std::int64_t t = 0; t < end; ++t) {
    step3_inplace(x, d, t, window);
    if (x.extinct) break;
    path.push_back(x.r);
  }
  check_cycle_sum(rep, scan, path, checks, pick, 2);
  return rep;
}

}  // namespace regenlab::contact
