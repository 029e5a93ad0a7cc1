#include "regenlab/regen/scanner.hpp"

#include <algorithm>
#include <sstream>

#include "regenlab/errors.hpp"

namespace regenlab::regen {

std::string to_string(UndecidedPolicy p) {
  switch (p) {
    case UndecidedPolicy::kTruncate:
      return "truncate";
    case UndecidedPolicy::kStrict:
      return "strict";
    case UndecidedPolicy::kEscalate:
      break;
  }
  return "escalate";
}

UndecidedPolicy undecided_policy_from_string(const std::string& s) {
  if (s == "truncate") return UndecidedPolicy::kTruncate;
  if (s == "strict") return UndecidedPolicy::kStrict;
  if (s == "escalate") return UndecidedPolicy::kEscalate;
  throw ConfigError("unknown undecided_policy '" + s + "' (expected truncate, strict or escalate)");
}

void BreakConfig::validate() const {
  if (horizon < 1) throw ConfigError("scanner: horizon must be >= 1");
  if (min_separation < 1) throw ConfigError("scanner: min_separation must be >= 1");
  if (max_time < 1) throw ConfigError("scanner: max_time must be >= 1");
  if (policy == UndecidedPolicy::kEscalate && escalation_cap < horizon)
    throw ConfigError("scanner: escalation_cap below horizon");
}

std::vector<double> ScanResult::gaps() const {
  std::vector<double> g;
  g.reserve(cycles.size());
  for (const auto& c : cycles) g.push_back(static_cast<double>(c.gap()));
  return g;
}

nlohmann::json ScanResult::summary() const {
  nlohmann::json j;
  j["breaks"] = taus.size();
  j["cycles"] = cycles.size();
  j["tau0"] = taus.empty() ? nlohmann::json(nullptr) : nlohmann::json(taus.front());
  j["horizon"] = horizon;
  j["max_horizon_used"] = max_horizon_used;
  j["truncated_breaks"] = truncated_breaks;
  j["future_evaluations"] = future_evaluations;
  if (!cycles.empty()) {
    double s = 0.0;
    for (const auto& c : cycles) s += static_cast<double>(c.gap());
    j["mean_gap"] = s / static_cast<double>(cycles.size());
  }
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

double difference_functional(double now, double base) { return now - base; }

PolicyDecision decide_future(const FutureEventSpec& f, const core::DrivingStream& stream, std::int64_t n,
                             const BreakConfig& cfg) {
  PolicyDecision d;
  std::int64_t h = cfg.horizon;
  d.verdict = evaluate_future(f, stream, n, h);
  if (cfg.policy == UndecidedPolicy::kEscalate) {
    while (d.verdict.is_undecided() && h < cfg.escalation_cap) {
      h = std::min(2 * h, cfg.escalation_cap);
      d.verdict = evaluate_future(f, stream, n, h);
    }
  }
  if (d.verdict.is_occurs()) {
    d.occurs = true;
  } else if (d.verdict.is_undecided() && cfg.policy != UndecidedPolicy::kStrict) {
    d.occurs = true;
    d.truncated = true;
  }
  return d;
}

std::vector<Cycle> cycles_from_taus(const std::vector<std::int64_t>& taus, const std::vector<double>& obs,
                                    const core::DrivingStream* stream, const RelativeFunctional& r) {
  std::vector<Cycle> cycles;
  if (taus.size() < 2) return cycles;
  cycles.reserve(taus.size() - 1);
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    Cycle c;
    c.k = static_cast<std::int64_t>(k);
    c.tau_start = taus[k];
    c.tau_end = taus[k + 1];
    if (stream != nullptr) {
      c.segment = stream->window(c.tau_start + 1, c.tau_end);
    } else {
      c.segment.lo = c.tau_start + 1;
      c.segment.hi = c.tau_end;
    }
    c.trace.reserve(static_cast<std::size_t>(c.gap()));
    const double base = obs[static_cast<std::size_t>(c.tau_start)];
    for (std::int64_t i = 1; i <= c.gap(); ++i) c.trace.push_back(r(obs[static_cast<std::size_t>(c.tau_start + i)], base));
    cycles.push_back(std::move(c));
  }
  return cycles;
}

ScanResult scan_break_times(ProcessAdapter& process, const core::DrivingStream& stream, const PastEventSpec& h,
                            const FutureEventSpec& f, const BreakConfig& cfg, const RelativeFunctional& r) {
  cfg.validate();
  ScanResult out;
  out.horizon = cfg.horizon;
  std::vector<double> obs(static_cast<std::size_t>(cfg.max_time) + 1);
  process.reset(stream);
  obs[0] = process.observable();
  std::int64_t last = -1;
  for (std::int64_t n = 0; n <= cfg.max_time; ++n) {
    if (n > 0) {
      process.advance();
      obs[static_cast<std::size_t>(n)] = process.observable();
    }
    if (last >= 0 && n < last + cfg.min_separation) continue;
    if (!h(History(n, stream, &process))) continue;
    const auto d = decide_future(f, stream, n, cfg);
    ++out.future_evaluations;
    out.max_horizon_used = std::max(out.max_horizon_used, d.verdict.horizon_used);
    if (!d.occurs) continue;
    if (d.truncated) ++out.truncated_breaks;
    out.taus.push_back(n);
    last = n;
  }
  if (out.taus.empty()) {
    out.diagnostic = "no break times in [0, " + std::to_string(cfg.max_time) + "]";
    return out;
  }
  if (cfg.store_segments && out.taus.front() > 0) out.delay = stream.window(1, out.taus.front());
  out.cycles = cycles_from_taus(out.taus, obs, cfg.store_segments ? &stream : nullptr, r);
  if (out.cycles.empty()) out.diagnostic = "a single break time; no complete cycle";
  return out;
}

core::Symbol CycleView::xi(std::int64_t index) const {
  const std::int64_t lo = std::max<std::int64_t>(1, cycle_->tau_start - m_ + 1);
  if (index < lo || index > cycle_->tau_end)
    throw ContractError("cycle functional read xi_" + std::to_string(index) + " outside [" + std::to_string(lo) +
                        ", " + std::to_string(cycle_->tau_end) + "]");
  return stream_->sample_at(index);
}

std::vector<std::vector<double>> functional_traces(const std::vector<Cycle>& cycles, const core::DrivingStream& stream,
                                                   const CycleFunctional& r, std::int64_t m) {
  if (m < 1) throw ConfigError("functional_traces: m must be >= 1");
  std::vector<std::vector<double>> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) {
    CycleView view(c, stream, m);
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(c.gap()));
    for (std::int64_t i = 1; i <= c.gap(); ++i) t.push_back(r(view, i));
    out.push_back(std::move(t));
  }
  return out;
}

std::string cycles_csv_header() { return "k,tau_start,tau_end,gap,trace\n"; }

std::string cycles_csv(const std::vector<Cycle>& cycles) {
  std::ostringstream os;
  os << cycles_csv_header();
  for (const auto& c : cycles) {
    os << c.k << ',' << c.tau_start << ',' << c.tau_end << ',' << c.gap() << ",\"" << nlohmann::json(c.trace).dump()
       << "\"\n";
  }
  return os.str();
}

}  // namespace regenlab::regen
