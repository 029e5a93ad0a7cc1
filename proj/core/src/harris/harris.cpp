#include "regenlab/harris/harris.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "regenlab/core/parallel.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/stats/estimators.hpp"

namespace regenlab::harris {

using core::Tag;

std::string to_string(ChainKind k) { return k == ChainKind::kSplit ? "split" : "lindley"; }

ChainKind chain_kind_from_string(const std::string& s) {
  if (s == "split") return ChainKind::kSplit;
  if (s == "lindley") return ChainKind::kLindley;
  throw ConfigError("unknown chain '" + s + "' (expected split or lindley)");
}

bool ChainSpec::in_state_space(double x) const noexcept {
  if (kind == ChainKind::kSplit) return x >= 0.0 && x <= 2.0;
  return x >= 0.0 && std::isfinite(x);
}

bool ChainSpec::in_small_set(double x) const noexcept {
  return kind == ChainKind::kSplit ? (x >= 0.0 && x <= 1.0) : x == 0.0;
}

void ChainSpec::validate() const {
  if (kind == ChainKind::kLindley) {
    if (!(service_mean > 0.0) || !(arrival_mean > 0.0)) throw ConfigError("lindley: means must be positive");
    if (!(service_mean < arrival_mean)) throw ConfigError("lindley: service mean must be below arrival mean");
  }
}

nlohmann::json ChainSpec::to_json() const {
  nlohmann::json j{{"chain", to_string(kind)}, {"p", p()}};
  if (kind == ChainKind::kLindley) {
    j["service_mean"] = service_mean;
    j["arrival_mean"] = arrival_mean;
  }
  return j;
}

ChainSpec ChainSpec::lindley(double service_mean, double arrival_mean) {
  ChainSpec s{ChainKind::kLindley, service_mean, arrival_mean};
  s.validate();
  return s;
}

namespace {

bool in_half_open(double y, double lo, double hi) { return y >= lo && y < hi; }

void require_split_v(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("residual kernel is defined for x in V = [0,1]");
}

void require_state(const ChainSpec& spec, double x) {
  if (!spec.in_state_space(x))
    throw DomainError("harris: state " + std::to_string(x) + " outside the state space of the " +
                      to_string(spec.kind) + " chain");
}

double lindley_increment(const ChainSpec& spec, const DrawSource& d, std::int64_t n) {
  const auto w = d.rng.word_pair(n, d.lane, Tag::kKernel, 0);
  const double s = -spec.service_mean * std::log(core::CounterRng::to_open_unit(w[0]));
  const double a = -spec.arrival_mean * std::log(core::CounterRng::to_open_unit(w[1]));
  return s - a;
}

}  // namespace

double kernel_density(double x, double y) {
  if (!(x >= 0.0 && x <= 2.0)) throw DomainError("kernel_density: x outside [0,2]");
  return in_half_open(y, x / 2.0, x / 2.0 + 1.0) ? 1.0 : 0.0;
}

double phi_density(double y) { return in_half_open(y, 0.5, 1.0) ? 2.0 : 0.0; }

double residual_density(double x, double y) {
  require_split_v(x);
  return in_half_open(y, x / 2.0, 0.5) || in_half_open(y, 1.0, x / 2.0 + 1.0) ? 2.0 : 0.0;
}

bool coin(const ChainSpec& spec, const DrawSource& d, std::int64_t n) {
  if (spec.p() >= 1.0) return true;
  return d.rng.uniform(n, d.lane, Tag::kCoin) < spec.p();
}

double step_direct(const ChainSpec& spec, const DrawSource& d, std::int64_t n, double x) {
  require_state(spec, x);
  if (spec.kind == ChainKind::kLindley) return std::max(0.0, x + lindley_increment(spec, d, n));
  return x / 2.0 + d.rng.uniform(n, d.lane, Tag::kKernel);
}

SplitStep step_split(const ChainSpec& spec, const DrawSource& d, std::int64_t n, double x) {
  require_state(spec, x);
  if (spec.kind == ChainKind::kLindley) {
    // V = {0} is an atom and p = 1: from 0 the kernel is phi itself.
    return {std::max(0.0, x + lindley_increment(spec, d, n)), x == 0.0};
  }
  if (!spec.in_small_set(x)) return {x / 2.0 + d.rng.uniform(n, d.lane, Tag::kKernel), false};
  if (coin(spec, d, n)) return {0.5 + 0.5 * d.rng.uniform(n, d.lane, Tag::kPsi), true};
  double y = x / 2.0 + 0.5 * d.rng.uniform(n, d.lane, Tag::kKernel);
  if (y >= 0.5) y += 0.5;
  return {y, false};
}

SplitStep step_split(const ChainSpec& spec, double x, const core::DrivingStream& stream, std::int64_t n) {
  return step_split(spec, DrawSource{stream.rng(), 0}, n + 1, x);
}

HarrisAdapter::HarrisAdapter(ChainSpec spec, double x0) : spec_(spec), x0_(x0), x_(x0) {
  spec_.validate();
  require_state(spec_, x0);
}

void HarrisAdapter::reset(const core::DrivingStream& stream) {
  stream_ = &stream;
  n_ = 0;
  x_ = x0_;
}

void HarrisAdapter::advance() {
  if (stream_ == nullptr) throw ContractError("HarrisAdapter::advance before reset");
  x_ = step_split(spec_, x_, *stream_, n_).x;
  ++n_;
}

regen::PastEventSpec small_set_event(const ChainSpec& spec) {
  return {"X_n in V", [spec](const regen::History& h) {
            if (h.process() == nullptr) throw ContractError("small_set_event needs the process state");
            return spec.in_small_set(h.process()->observable());
          }};
}

regen::FutureEventSpec coin_event(const ChainSpec& spec) {
  return regen::FutureEventSpec(
      "alpha_{n+1} = 1",
      [spec](const core::DrivingStream& s, std::int64_t n) -> regen::FutureStepper {
        const DrawSource d{s.rng(), 0};
        return [spec, d, n](std::int64_t) {
          return coin(spec, d, n + 1) ? regen::Progress::kOccurs : regen::Progress::kFails;
        };
      },
      1);
}

std::vector<double> HarrisScan::gaps() const {
  std::vector<double> g;
  g.reserve(cycles.size());
  for (const auto& c : cycles) g.push_back(static_cast<double>(c.gap()));
  return g;
}

nlohmann::json HarrisScan::summary() const {
  nlohmann::json j{{"successes", success_times.size()}, {"cycles", cycles.size()}, {"visits", visits}};
  j["T0"] = success_times.empty() ? nlohmann::json(nullptr) : nlohmann::json(success_times.front());
  if (!cycles.empty()) j["mean_gap"] = stats::mean(gaps());
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

HarrisScan regeneration_scan(const ChainSpec& spec, const core::DrivingStream& stream, std::int64_t N, double x0) {
  spec.validate();
  require_state(spec, x0);
  if (N < 1) throw ConfigError("regeneration_scan: N must be positive");
  HarrisScan out;
  std::vector<double> path(static_cast<std::size_t>(N) + 1);
  path[0] = x0;
  for (std::int64_t n = 0; n < N; ++n) {
    const double x = path[static_cast<std::size_t>(n)];
    if (spec.in_small_set(x)) ++out.visits;
    const auto s = step_split(spec, x, stream, n);
    path[static_cast<std::size_t>(n) + 1] = s.x;
    if (s.regenerated) out.success_times.push_back(n + 1);
  }
  const auto& T = out.success_times;
  for (std::size_t i = 0; i + 1 < T.size(); ++i) {
    regen::Cycle c;
    c.k = static_cast<std::int64_t>(i);
    c.tau_start = T[i];
    c.tau_end = T[i + 1];
    c.trace.assign(path.begin() + T[i], path.begin() + T[i + 1]);
    out.cycles.push_back(std::move(c));
  }
  if (T.size() < 2)
    out.diagnostic = "fewer than 2 successes in " + std::to_string(N) + " steps";
  return out;
}

std::vector<std::int64_t> generic_success_times(const ChainSpec& spec, const core::DrivingStream& stream,
                                                std::int64_t N, double x0) {
  HarrisAdapter adapter(spec, x0);
  regen::BreakConfig cfg;
  cfg.horizon = 1;
  cfg.min_separation = 1;
  cfg.max_time = N - 1;
  cfg.store_segments = false;
  const auto r = regen::scan_break_times(adapter, stream, small_set_event(spec), coin_event(spec), cfg);
  std::vector<std::int64_t> t;
  t.reserve(r.taus.size());
  for (auto n : r.taus) t.push_back(n + 1);
  return t;
}

DecompositionCheck check_decomposition(std::int64_t points) {
  if (points < 2) throw ConfigError("check_decomposition: need at least 2 points");
  const double p = 0.5;
  DecompositionCheck c;
  c.points = points;
  c.min_slack = c.min_residual = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    for (std::int64_t j = 0; j < points; ++j) {
      const double y = 2.0 * static_cast<double>(j) / static_cast<double>(points - 1);
      const double k = kernel_density(x, y);
      const double q = residual_density(x, y);
      c.max_error = std::max(c.max_error, std::abs(k - p * phi_density(y) - (1.0 - p) * q));
      c.min_residual = std::min(c.min_residual, q);
      if (y >= 0.5 && y < 1.0) c.min_slack = std::min(c.min_slack, k - p * phi_density(y));
    }
    const double mass = 2.0 * ((0.5 - x / 2.0) + (x / 2.0 + 1.0 - 1.0));
    c.max_residual_mass_error = std::max(c.max_residual_mass_error, std::abs(mass - 1.0));
  }
  return c;
}

void TvConfig::validate() const {
  spec.validate();
  if (inits.empty()) throw ConfigError("tv_convergence_check: no initial states");
  for (double x : inits)
    if (!spec.in_state_space(x)) throw DomainError("tv_convergence_check: initial state outside the state space");
  if (steps.empty()) throw ConfigError("tv_convergence_check: no step counts");
  for (auto n : steps)
    if (n < 0) throw ConfigError("tv_convergence_check: negative step count");
  if (replicas < 10000) throw ConfigError("tv_convergence_check: replicas must be at least 10^4");
  if (bins < 1) throw ConfigError("tv_convergence_check: bins must be positive");
  if (static_cast<double>(replicas) * static_cast<double>(inits.size()) > 4.0e9)
    throw ConfigError("tv_convergence_check: too many replicas for the lane space");
}

nlohmann::json TvReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < steps.size(); ++s)
    rows.push_back({{"n", steps[s]}, {"max_tv", max_tv[s]}, {"tv", tv[s]}});
  return {{"inits", inits}, {"coupling", coupling}, {"noise_floor", noise_floor}, {"steps", rows}};
}

std::vector<double> sample_endpoints(const ChainSpec& spec, std::uint64_t seed, double x0, std::int64_t n,
                                     std::int64_t replicas, std::uint32_t lane_base, bool split) {
  require_state(spec, x0);
  std::vector<double> out(static_cast<std::size_t>(replicas));
  const core::CounterRng rng(seed);
  core::parallel_for(out.size(), [&](std::size_t r) {
    const DrawSource d{rng, lane_base + static_cast<std::uint32_t>(r)};
    double x = x0;
    for (std::int64_t t = 1; t <= n; ++t) x = split ? step_split(spec, d, t, x).x : step_direct(spec, d, t, x);
    out[r] = x;
  });
  return out;
}

TvReport tv_convergence_check(const TvConfig& cfg) {
  cfg.validate();
  TvReport rep;
  rep.inits = cfg.inits;
  rep.steps = cfg.steps;
  rep.coupling = cfg.coupling == ReplicaCoupling::kCommon ? "common" : "independent";
  const std::size_t k = cfg.inits.size();
  std::vector<double> pooled_probs;
  for (auto n : cfg.steps) {
    std::vector<std::vector<double>> samples(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto lane = cfg.coupling == ReplicaCoupling::kCommon
                            ? 0u
                            : static_cast<std::uint32_t>(i * static_cast<std::size_t>(cfg.replicas));
      samples[i] = sample_endpoints(cfg.spec, cfg.seed, cfg.inits[i], n, cfg.replicas, lane);
    }
    stats::Binning binning{0.0, 2.0, cfg.bins};
    if (cfg.spec.kind == ChainKind::kLindley) {
      double hi = 0.0;
      for (const auto& s : samples) hi = std::max(hi, *std::max_element(s.begin(), s.end()));
      binning.hi = hi > 0.0 ? hi : 1.0;
    }
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        m[i][j] = m[j][i] = stats::tv_empirical(samples[i], samples[j], binning);
        worst = std::max(worst, m[i][j]);
      }
    rep.tv.push_back(std::move(m));
    rep.max_tv.push_back(worst);

    pooled_probs.assign(static_cast<std::size_t>(cfg.bins), 0.0);
    for (const auto& s : samples)
      for (double v : s) pooled_probs[static_cast<std::size_t>(binning.bin_of(v))] += 1.0;
  }
  // E|B1/n - B2/n| ~ sqrt(2/pi) sqrt(2 q (1 - q) / n) per bin.
  const double total = static_cast<double>(cfg.replicas) * static_cast<double>(k);
  const double nr = static_cast<double>(cfg.replicas);
  for (double c : pooled_probs) {
    const double q = c / total;
    rep.noise_floor += 0.5 * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(2.0 * q * (1.0 - q) / nr);
  }
  return rep;
}

}  // namespace regenlab::harris
