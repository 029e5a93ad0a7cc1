#include "regenlab/walk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "regenlab/errors.hpp"

namespace regenlab::walk {

void WalkConfig::validate() const {
  if (N < 1) throw ConfigError("walk: N must be >= 1");
  const double mean = core::law_mean(increments);
  if (!(mean > 0.0)) throw ConfigError("walk: increment mean must be positive (got " + std::to_string(mean) + ")");
}

WalkPath simulate_walk(const WalkConfig& cfg, const core::DrivingStream& stream) {
  cfg.validate();
  WalkPath p;
  p.s.resize(static_cast<std::size_t>(cfg.N) + 1);
  p.s[0] = 0.0;
  for (std::int64_t n = 1; n <= cfg.N; ++n)
    p.s[static_cast<std::size_t>(n)] = p.s[static_cast<std::size_t>(n - 1)] + stream.sample_at(n);
  return p;
}

namespace {
bool violates(double partial, Inequality ineq) { return ineq == Inequality::kWeak ? partial < 0.0 : partial <= 0.0; }
}  // namespace

regen::FutureEventSpec future_event(Inequality ineq) {
  return regen::FutureEventSpec(ineq == Inequality::kWeak ? "walk_weak" : "walk_strict",
                                [ineq](const core::DrivingStream& s, std::int64_t n) {
                                  return [&s, n, ineq, sum = 0.0](std::int64_t lag) mutable {
                                    sum += s.sample_at(n + lag);
                                    return violates(sum, ineq) ? regen::Progress::kFails : regen::Progress::kContinue;
                                  };
                                });
}

regen::FutureEventSpec next_zero_event() {
  const regen::FutureEventSpec zero_at_two(
      "xi2_zero",
      [](const core::DrivingStream& s, std::int64_t n) {
        return [&s, n](std::int64_t lag) {
          if (lag < 2) return regen::Progress::kContinue;
          return s.sample_at(n + 2) == 0.0 ? regen::Progress::kOccurs : regen::Progress::kFails;
        };
      },
      2);
  return regen::FutureEventSpec::intersect(future_event(Inequality::kWeak), zero_at_two);
}

regen::FutureEventSpec future_event_on_path(Inequality ineq, const core::DrivingStream& stream, std::int64_t N,
                                            std::int64_t H) {
  if (N < 0 || H < 1) throw ConfigError("future_event_on_path: need N >= 0 and H >= 1");
  const std::int64_t len = N + H;
  std::vector<double> s(static_cast<std::size_t>(len) + 1, 0.0);
  for (std::int64_t i = 1; i <= len; ++i)
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i - 1)] + stream.sample_at(i);
  // next[i]: first m > i with S_m - S_i violating the inequality, or -1.
  auto next = std::make_shared<std::vector<std::int64_t>>(static_cast<std::size_t>(N) + 1, -1);
  std::vector<std::int64_t> stack;
  for (std::int64_t i = len; i >= 0; --i) {
    const double si = s[static_cast<std::size_t>(i)];
    while (!stack.empty()) {
      const double st = s[static_cast<std::size_t>(stack.back())];
      if (violates(st - si, ineq)) break;
      stack.pop_back();
    }
    if (i <= N) (*next)[static_cast<std::size_t>(i)] = stack.empty() ? -1 : stack.back();
    stack.push_back(i);
  }
  const std::uint64_t seed = stream.seed();
  const std::int64_t offset = stream.origin_offset();
  auto base = future_event(ineq);
  return base.with_direct([next, seed, offset, N, H, base](const core::DrivingStream& st, std::int64_t n,
                                                            std::int64_t horizon) {
    if (st.seed() != seed || st.origin_offset() != offset || n < 0 || n > N || horizon > H)
      return regen::evaluate_future(base, st, n, horizon, true);
    const std::int64_t m = (*next)[static_cast<std::size_t>(n)];
    if (m >= 0 && m - n <= horizon) return regen::FutureVerdict::fails(m - n);
    return regen::FutureVerdict::undecided(horizon);
  });
}

void WalkAdapter::reset(const core::DrivingStream& stream) {
  stream_ = &stream;
  n_ = 0;
  s_ = 0.0;
  past_max_ = -std::numeric_limits<double>::infinity();
}

void WalkAdapter::advance() {
  past_max_ = std::max(past_max_, s_);
  ++n_;
  s_ += stream_->sample_at(n_);
}

regen::PastEventSpec strict_record() {
  return {"strict_record", [](const regen::History& h) {
            const auto* w = dynamic_cast<const WalkAdapter*>(h.process());
            if (w == nullptr) throw ContractError("strict_record: needs a WalkAdapter process");
            if (w->time() != h.n()) throw MeasurabilityError("strict_record: process is not at the base time");
            return w->at_strict_record();
          }};
}

double occurrence_density(const regen::ScanResult& r, std::int64_t N) {
  return static_cast<double>(r.taus.size()) / static_cast<double>(N + 1);
}

double truncated_future_probability(const core::Alphabet& law, std::int64_t L, Inequality ineq) {
  if (L < 1) throw ConfigError("truncated_future_probability: L must be >= 1");
  long lo = 0, hi = 0;
  for (double v : law.symbols()) {
    if (v != std::floor(v)) throw ConfigError("truncated_future_probability: integer symbols required");
    lo = std::min(lo, static_cast<long>(v));
    hi = std::max(hi, static_cast<long>(v));
  }
  // mass[v - min_sum] over surviving partial sums.
  const long min_sum = lo * L, max_sum = hi * L;
  std::vector<double> mass(static_cast<std::size_t>(max_sum - min_sum + 1), 0.0), next(mass.size());
  mass[static_cast<std::size_t>(-min_sum)] = 1.0;
  long cur_lo = 0, cur_hi = 0;
  for (std::int64_t step = 0; step < L; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    long nlo = std::numeric_limits<long>::max(), nhi = std::numeric_limits<long>::min();
    for (long v = cur_lo; v <= cur_hi; ++v) {
      const double m = mass[static_cast<std::size_t>(v - min_sum)];
      if (m == 0.0) continue;
      for (std::size_t i = 0; i < law.size(); ++i) {
        const long w = v + static_cast<long>(law.symbols()[i]);
        if (violates(static_cast<double>(w), ineq)) continue;
        next[static_cast<std::size_t>(w - min_sum)] += m * law.weights()[i];
        nlo = std::min(nlo, w);
        nhi = std::max(nhi, w);
      }
    }
    mass.swap(next);
    if (nlo > nhi) return 0.0;
    cur_lo = nlo;
    cur_hi = nhi;
  }
  double p = 0.0;
  for (double m : mass) p += m;
  return p;
}

regen::ScanResult two_sided_record_scan(const core::DrivingStream& stream, const WalkConfig& cfg,
                                        std::int64_t horizon) {
  cfg.validate();
  regen::BreakConfig bc;
  bc.horizon = horizon;
  bc.max_time = cfg.N;
  WalkAdapter process;
  return regen::scan_break_times(process, stream, strict_record(),
                                 future_event_on_path(Inequality::kStrict, stream, cfg.N, horizon), bc);
}

std::int64_t check_sandwich(const std::vector<std::int64_t>& taus, const core::DrivingStream& stream,
                            std::int64_t horizon) {
  if (taus.empty()) return -1;
  const std::int64_t len = taus.back() + horizon;
  std::vector<double> s(static_cast<std::size_t>(len) + 1, 0.0);
  for (std::int64_t i = 1; i <= len; ++i)
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i - 1)] + stream.sample_at(i);
  // Running prefix max is checked incrementally as taus increase.
  double past_max = -std::numeric_limits<double>::infinity();
  std::int64_t scanned = 0;
  for (std::int64_t tau : taus) {
    for (; scanned < tau; ++scanned) past_max = std::max(past_max, s[static_cast<std::size_t>(scanned)]);
    const double st = s[static_cast<std::size_t>(tau)];
    if (!(past_max < st)) return tau;
    for (std::int64_t n = tau + 1; n <= tau + horizon; ++n)
      if (!(st < s[static_cast<std::size_t>(n)])) return tau;
  }
  return -1;
}

}  // namespace regenlab::walk
