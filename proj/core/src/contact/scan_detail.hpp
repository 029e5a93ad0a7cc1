#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "regenlab/contact/contact.hpp"

namespace regenlab::contact {

namespace detail {

// Closes the cycle [tau_prev, tau_next] given the probe path at tau_prev,
// re-running the probe when the gap exceeds the recorded horizon.
template <class ProbeFn>
void close_cycle(ContactScan& out, std::int64_t tau_prev, std::int64_t tau_next, std::vector<std::int64_t> path,
                 ProbeFn probe) {
  const std::int64_t gap = tau_next - tau_prev;
  if (static_cast<std::int64_t>(path.size()) <= gap) {
    ++out.overlong_gaps;
    path = probe(tau_prev, gap).path;
  }
  regen::Cycle c;
  c.k = static_cast<std::int64_t>(out.scan.cycles.size());
  c.tau_start = tau_prev;
  c.tau_end = tau_next;
  c.segment.lo = tau_prev + 1;
  c.segment.hi = tau_next;
  c.trace.reserve(static_cast<std::size_t>(gap));
  for (std::int64_t i = 1; i <= gap; ++i) {
    c.trace.push_back(i < static_cast<std::int64_t>(path.size()) ? static_cast<double>(path[static_cast<std::size_t>(i)])
                                                                   : std::nan(""));
  }
  out.increments.push_back(c.trace.back());
  out.scan.cycles.push_back(std::move(c));
}

inline void finish_scan(ContactScan& out, std::int64_t N, std::int64_t T) {
  out.scan.horizon = T;
  out.scan.future_evaluations = out.probes;
  out.scan.truncated_breaks = static_cast<std::int64_t>(out.scan.taus.size());
  if (out.scan.taus.empty())
    out.scan.diagnostic = "no break times in [0, " + std::to_string(N) + "]";
  else if (out.scan.cycles.empty())
    out.scan.diagnostic = "a single break time; no complete cycle";
}

}  // namespace detail

}  // namespace regenlab::contact
