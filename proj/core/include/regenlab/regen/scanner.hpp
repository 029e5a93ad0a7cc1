#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/core/driving_stream.hpp"
#include "regenlab/regen/events.hpp"

namespace regenlab::regen {

enum class UndecidedPolicy : std::uint8_t {
  // Undecided at the horizon counts as F occurring. Break times are then exact
  // for the truncated event "F not failed within the horizon", itself a
  // stationary future event.
  kTruncate,
  // Undecided counts as F failing.
  kStrict,
  // Double the horizon until decided or the cap is reached, then truncate.
  kEscalate,
};

std::string to_string(UndecidedPolicy p);
UndecidedPolicy undecided_policy_from_string(const std::string& s);

struct BreakConfig {
  std::int64_t horizon = 1000;
  std::int64_t min_separation = 1;
  std::int64_t max_time = 1000;
  UndecidedPolicy policy = UndecidedPolicy::kTruncate;
  std::int64_t escalation_cap = 1 << 20;
  bool store_segments = true;

  void validate() const;
};

struct Cycle {
  std::int64_t k = 0;
  std::int64_t tau_start = 0;
  std::int64_t tau_end = 0;
  // xi_{tau_start+1}..xi_{tau_end}; values are left empty for drivers that
  // are not scalar symbol streams.
  core::Window segment;
  std::vector<double> trace;

  std::int64_t gap() const noexcept { return tau_end - tau_start; }
};

struct ScanResult {
  std::vector<std::int64_t> taus;
  std::vector<Cycle> cycles;
  // Delayed segment xi_1..xi_{tau_0}; excluded from identical-distribution tests.
  std::optional<core::Window> delay;
  std::int64_t horizon = 0;
  std::int64_t max_horizon_used = 0;
  std::int64_t truncated_breaks = 0;  // break times whose F verdict was Undecided
  std::int64_t future_evaluations = 0;
  std::string diagnostic;

  std::vector<double> gaps() const;
  nlohmann::json summary() const;
};

// R_i as a function of (observable at tau + i, observable at tau).
using RelativeFunctional = std::function<double(double now, double base)>;
double difference_functional(double now, double base);

// Greedy-from-left scan: n is a break time iff n >= previous + min_separation,
// H_n holds and F_n occurs under the undecided policy.
ScanResult scan_break_times(ProcessAdapter& process, const core::DrivingStream& stream, const PastEventSpec& h,
                            const FutureEventSpec& f, const BreakConfig& cfg,
                            const RelativeFunctional& r = difference_functional);

// Decides F_n under the policy: true when n qualifies as a break time given H_n.
struct PolicyDecision {
  bool occurs = false;
  bool truncated = false;
  FutureVerdict verdict;
};
PolicyDecision decide_future(const FutureEventSpec& f, const core::DrivingStream& stream, std::int64_t n,
                             const BreakConfig& cfg);

// Builds cycles from break times and an observable path obs[0..max_time].
std::vector<Cycle> cycles_from_taus(const std::vector<std::int64_t>& taus, const std::vector<double>& obs,
                                    const core::DrivingStream* stream, const RelativeFunctional& r);

// Read access to xi inside the window a cycle functional may depend on:
// xi_{tau_start - m + 1}..xi_{tau_end}.
class CycleView {
 public:
  CycleView(const Cycle& c, const core::DrivingStream& stream, std::int64_t m)
      : cycle_(&c), stream_(&stream), m_(m) {}
  core::Symbol xi(std::int64_t index) const;
  const Cycle& cycle() const noexcept { return *cycle_; }

 private:
  const Cycle* cycle_;
  const core::DrivingStream* stream_;
  std::int64_t m_;
};

// R(view, i) for i = 1..gap. Out-of-window reads raise ContractError.
using CycleFunctional = std::function<double(const CycleView& view, std::int64_t i)>;
std::vector<std::vector<double>> functional_traces(const std::vector<Cycle>& cycles, const core::DrivingStream& stream,
                                                   const CycleFunctional& r, std::int64_t m = 1);

// Row of the cycles CSV: k,tau_start,tau_end,gap,"[trace]".
std::string cycles_csv(const std::vector<Cycle>& cycles);
std::string cycles_csv_header();

}  // namespace regenlab::regen
