#pragma once

#include <cstdint>
#include <vector>

#include "regenlab/core/driving_stream.hpp"
#include "regenlab/regen/events.hpp"
#include "regenlab/regen/scanner.hpp"

namespace regenlab::walk {

struct WalkConfig {
  core::Law increments = core::Alphabet::skip_free_walk(0.4, 0.2);
  std::int64_t N = 1000;

  // Positive drift is required; a law without negative mass is accepted but
  // makes every index a break time.
  void validate() const;
};

struct WalkPath {
  std::vector<double> s;  // s[0] = 0, s[n] = xi_1 + ... + xi_n

  std::int64_t length() const noexcept { return static_cast<std::int64_t>(s.size()) - 1; }
};

WalkPath simulate_walk(const WalkConfig& cfg, const core::DrivingStream& stream);

// Weak: S_m - S_n >= 0 for all m > n. Strict: S_m - S_n > 0 (last
// exit times). Fails at the first violating lag; never Occurs in finite time.
enum class Inequality : std::uint8_t { kWeak, kStrict };

regen::FutureEventSpec future_event(Inequality ineq);
inline regen::FutureEventSpec last_exit_events() { return future_event(Inequality::kStrict); }

// Weak future intersected with xi_{n+2} = 0.
regen::FutureEventSpec next_zero_event();

// Same event with a direct evaluator backed by next-smaller-element indices
// over S_0..S_{N+H}; answers any base n <= N with horizon <= H in O(1) and
// falls back to the stepper otherwise.
regen::FutureEventSpec future_event_on_path(Inequality ineq, const core::DrivingStream& stream, std::int64_t N,
                                            std::int64_t H);

// Process adapter for S_n that also tracks the running maximum.
class WalkAdapter final : public regen::ProcessAdapter {
 public:
  void reset(const core::DrivingStream& stream) override;
  void advance() override;
  std::int64_t time() const override { return n_; }
  double observable() const override { return s_; }
  // S_n > S_j for all j < n (true at n = 0).
  bool at_strict_record() const noexcept { return n_ == 0 || s_ > past_max_; }

 private:
  const core::DrivingStream* stream_ = nullptr;
  std::int64_t n_ = 0;
  double s_ = 0.0;
  double past_max_ = 0.0;
};

// H_n: strict ladder record. Requires a WalkAdapter process.
regen::PastEventSpec strict_record();

// Fraction of n in [0, N] that are break times under the weak event.
double occurrence_density(const regen::ScanResult& r, std::int64_t N);

// Pr(F_0) truncated at lookahead L for an integer-valued finite law, by
// dynamic programming over the partial sum. Non-increasing in L.
double truncated_future_probability(const core::Alphabet& law, std::int64_t L, Inequality ineq);

// Scan with H = strict record and F = strict future minimum (Ex. rw2).
regen::ScanResult two_sided_record_scan(const core::DrivingStream& stream, const WalkConfig& cfg,
                                        std::int64_t horizon);

// max_{n<tau} S_n < S_tau < min_{tau<n<=tau+H} S_n for every reported tau;
// returns the first violating tau, or -1.
std::int64_t check_sandwich(const std::vector<std::int64_t>& taus, const core::DrivingStream& stream,
                            std::int64_t horizon);

}  // namespace regenlab::walk
