#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

#include "regenlab/bins/bins.hpp"
#include "regenlab/errors.hpp"

namespace regenlab::bins {

namespace {

constexpr std::int64_t kFanout = 64;

constexpr std::int64_t span_of(int level) noexcept {
  std::int64_t s = 1;
  for (int l = 0; l < level; ++l) s *= kFanout;
  return s;
}

constexpr std::int64_t kMaxRanks = span_of(LinkDriving::kLevels);

// Maximum of K i.i.d. unit exponentials conditioned to be <= cap, by
// inversion of (1 - e^{-x})^K; cap = infinity gives the unconditional law.
double conditional_max(double u, double k, double cap) {
  const double log_cap_cdf = std::isinf(cap) ? 0.0 : std::log1p(-std::exp(-cap));
  const double t = std::log(u) / k + log_cap_cdf;
  return -std::log(-std::expm1(t));
}

void place(LinkState& x, double h, std::int64_t id) {
  if (h > 0.0) {
    for (auto& p : x.positions) p -= h;
    x.positions.push_back(0.0);
    x.ids.push_back(id);
    return;
  }
  const auto it = std::lower_bound(x.positions.begin(), x.positions.end(), h);
  const auto at = it - x.positions.begin();
  x.positions.insert(it, h);
  x.ids.insert(x.ids.begin() + at, id);
}

void check_links_config(const LinksConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw ConfigError("links: p must lie in (0, 1]");
  if (!(cfg.mean_length > 0.0)) throw ConfigError("links: mean length must be > 0");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ConfigError("links: epsilon must lie in (0, 1)");
  if (cfg.blocks < 1) throw ConfigError("links: K must be >= 1");
  if (cfg.horizon < 1) throw ConfigError("links: horizon must be >= 1");
  if (cfg.steps < 1) throw ConfigError("links: steps must be >= 1");
  if (cfg.depth < 0) throw ConfigError("links: depth must be >= 0");
  if (cfg.calibration_steps < 1) throw ConfigError("links: calibration steps must be >= 1");
}

// nu_n capped at the horizon; a pure function of the activity bits.
std::int64_t capped_nu(const LinkDriving& d, std::int64_t n, std::int64_t horizon) {
  const auto v = d.nu(n, horizon);
  return v < 0 ? horizon : v;
}

}  // namespace

bool LinkState::valid() const noexcept {
  if (positions.empty() || positions.size() != ids.size() || positions.back() != 0.0) return false;
  return std::is_sorted(positions.begin(), positions.end());
}

StepOutcome step_links(LinkState& x, const std::vector<double>& lengths, const std::vector<bool>& active,
                       std::int64_t new_id) {
  const std::size_t size = x.size();
  if (lengths.size() < size || active.size() < size)
    throw ConfigError("step_links: need a length and an activity bit for every particle");
  StepOutcome out;
  for (std::size_t j = 0; j < size; ++j) {
    if (!active[j]) continue;
    if (!(lengths[j] > 0.0)) throw DomainError("step_links: lengths must be > 0");
    if (out.nu < 0) out.nu = static_cast<std::int64_t>(j);
    const double h = x.rank_position(j) + lengths[j];
    if (out.parent_rank < 0 || h > out.h) {
      out.h = h;
      out.parent_rank = static_cast<std::int64_t>(j);
    }
  }
  if (out.parent_rank < 0) {
    out.h = x.positions.front();
  } else {
    out.parent_id = x.rank_id(static_cast<std::size_t>(out.parent_rank));
  }
  place(x, out.h, new_id);
  return out;
}

LinkDriving::LinkDriving(std::uint64_t seed, double p, double mean_length)
    : rng_(seed), p_(p), mean_(mean_length), threshold_(core::CounterRng::threshold_of(p)) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("LinkDriving: p must lie in (0, 1]");
  if (!(mean_length > 0.0)) throw ConfigError("LinkDriving: mean length must be > 0");
}

std::uint64_t LinkDriving::active_word(std::int64_t n, std::int64_t block) const noexcept {
  return rng_.bernoulli_word(n, static_cast<std::uint32_t>(block), core::Tag::kActivity, threshold_);
}

bool LinkDriving::active(std::int64_t n, std::int64_t j) const noexcept {
  return (active_word(n, j / 64) >> (j % 64)) & 1u;
}

std::int64_t LinkDriving::nu(std::int64_t n, std::int64_t size) const noexcept {
  for (std::int64_t block = 0; block * 64 < size; ++block) {
    std::uint64_t w = active_word(n, block);
    const std::int64_t left = size - block * 64;
    if (left < 64) w &= (std::uint64_t{1} << left) - 1;
    if (w) return block * 64 + std::countr_zero(w);
  }
  return -1;
}

// Node (level L, index v) owns word 2L (which child carries its maximum)
// and uniform 2L + 1 (its own maximum given its parent's).
double LinkDriving::root_max(std::int64_t n) const {
  const double u = rng_.uniform(n, 0, core::Tag::kLength, 2 * kLevels + 1);
  return conditional_max(u, static_cast<double>(kMaxRanks), INFINITY);
}

double LinkDriving::child_max(std::int64_t n, int level, std::int64_t node, std::int64_t child,
                              double parent_max) const {
  const auto argmax = static_cast<std::int64_t>(
      rng_.word(n, static_cast<std::uint32_t>(node), core::Tag::kLength, static_cast<std::uint32_t>(2 * level)) % 64);
  if (child == argmax) return parent_max;
  const double u = rng_.uniform(n, static_cast<std::uint32_t>(node * kFanout + child), core::Tag::kLength,
                                static_cast<std::uint32_t>(2 * (level - 1) + 1));
  return conditional_max(u, static_cast<double>(span_of(level - 1)), parent_max);
}

double LinkDriving::length(std::int64_t n, std::int64_t j) const {
  if (j < 0 || j >= kMaxRanks) throw DomainError("LinkDriving: rank outside the length tree");
  double m = root_max(n);
  for (int level = kLevels; level >= 1; --level) {
    const std::int64_t node = j / span_of(level);
    const std::int64_t child = (j / span_of(level - 1)) % kFanout;
    m = child_max(n, level, node, child, m);
  }
  return mean_ * m;
}

template <class Prune, class Visit>
void LinkDriving::descend(std::int64_t n, int level, std::int64_t node, double max_unit, std::int64_t from,
                          std::int64_t size, const Prune& prune, Visit& visit) const {
  const std::int64_t first = node * span_of(level);
  if (first >= size || first + span_of(level) <= from) return;
  if (prune(std::max(first, from), max_unit)) return;
  if (level == 0) {
    visit(first, max_unit);
    return;
  }
  const auto argmax = static_cast<std::int64_t>(
      rng_.word(n, static_cast<std::uint32_t>(node), core::Tag::kLength, static_cast<std::uint32_t>(2 * level)) % 64);
  const double k = static_cast<double>(span_of(level - 1));
  for (std::int64_t c = 0; c < kFanout; ++c) {
    const std::int64_t child = node * kFanout + c;
    const std::int64_t child_first = child * span_of(level - 1);
    if (child_first >= size) break;
    if (child_first + span_of(level - 1) <= from) continue;
    double m = max_unit;
    if (c != argmax) {
      const double u = rng_.uniform(n, static_cast<std::uint32_t>(child), core::Tag::kLength,
                                    static_cast<std::uint32_t>(2 * (level - 1) + 1));
      m = conditional_max(u, k, max_unit);
    }
    descend(n, level - 1, child, m, from, size, prune, visit);
  }
}

std::int64_t LinkDriving::exceeds(std::int64_t n, std::int64_t from, std::int64_t size, double threshold,
                                  const std::function<double(std::int64_t)>& offset) const {
  if (size > kMaxRanks) throw DomainError("LinkDriving: more ranks than the length tree holds");
  if (from >= size) return -1;
  std::int64_t found = -1;
  const auto prune = [&](std::int64_t first, double m) { return found >= 0 || mean_ * m - offset(first) <= threshold; };
  auto visit = [&](std::int64_t j, double l) {
    if (mean_ * l - offset(j) > threshold) found = j;
  };
  descend(n, kLevels, 0, root_max(n), from, size, prune, visit);
  return found;
}

StepOutcome LinkDriving::step(LinkState& x, std::int64_t n, std::int64_t new_id) const {
  const auto size = static_cast<std::int64_t>(x.size());
  if (size >= kMaxRanks) throw DomainError("LinkDriving: more particles than the length tree holds");
  const std::int64_t t = n + 1;
  StepOutcome out;
  out.nu = nu(t, size);
  if (out.nu < 0) {
    out.h = x.positions.front();
    place(x, out.h, new_id);
    return out;
  }
  const auto pos = [&](std::int64_t j) { return x.rank_position(static_cast<std::size_t>(j)); };
  out.parent_rank = out.nu;
  out.h = pos(out.nu) + length(t, out.nu);
  std::int64_t cached_block = -1;
  std::uint64_t bits = 0;
  const auto prune = [&](std::int64_t first, double m) { return pos(first) + mean_ * m <= out.h; };
  auto visit = [&](std::int64_t j, double l) {
    if (j / 64 != cached_block) {
      cached_block = j / 64;
      bits = active_word(t, cached_block);
    }
    if (!((bits >> (j % 64)) & 1u)) return;
    const double h = pos(j) + mean_ * l;
    if (h > out.h) {
      out.h = h;
      out.parent_rank = j;
    }
  };
  descend(t, kLevels, 0, root_max(t), out.nu + 1, size, prune, visit);
  out.parent_id = x.rank_id(static_cast<std::size_t>(out.parent_rank));
  place(x, out.h, new_id);
  return out;
}

// ------------------------------------------------------------ events

double f1_probability(double p, std::int64_t horizon) {
  const double q = 1.0 - p;
  double prod = 1.0, qj = 1.0;
  for (std::int64_t j = 1; j <= horizon; ++j) {
    qj *= q;
    prod *= 1.0 - qj;
  }
  return prod;
}

bool f1_holds(const LinkDriving& d, std::int64_t n, std::int64_t horizon) {
  for (std::int64_t j = 1; j <= horizon; ++j)
    if (d.nu(n + j, j) < 0) return false;
  return true;
}

double LinkConstants::c(std::int64_t j) const noexcept {
  const double r = std::ceil((static_cast<double>(j) / (1.0 + epsilon) - b0) / b) - 1.0;
  return r > 0.0 ? r * a * (1.0 - epsilon) : 0.0;
}

nlohmann::json LinkConstants::to_json() const {
  return {{"a", a}, {"epsilon", epsilon}, {"b", b}, {"b0", b0}, {"b_exact", b_exact},
          {"calibration_gaps", calibration_gaps}};
}

LinkConstants calibrate_links(const LinksConfig& cfg, std::uint64_t seed) {
  check_links_config(cfg);
  const LinkDriving d(seed, cfg.p, cfg.mean_length);
  std::vector<std::int64_t> reds;
  for (std::int64_t m = 0; m <= cfg.calibration_steps; ++m)
    if (f1_holds(d, m, cfg.horizon)) reds.push_back(m);
  if (reds.size() < 3) throw DomainError("calibrate_links: fewer than two F^(1) gaps in the calibration run");
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 1; i < reds.size(); ++i) {
    const auto g = static_cast<double>(reds[i] - reds[i - 1]);
    s1 += g;
    s2 += g * g;
  }
  const auto count = static_cast<double>(reds.size() - 1);
  LinkConstants c;
  c.a = cfg.mean_length;
  c.epsilon = cfg.epsilon;
  c.b = s1 / count;
  c.b0 = (s2 / count - c.b) / (2.0 * c.b);
  c.b_exact = 1.0 / f1_probability(cfg.p, cfg.horizon);
  c.calibration_gaps = static_cast<std::int64_t>(count);
  return c;
}

nlohmann::json LinksScan::summary() const {
  auto j = scan.summary();
  j["constants"] = constants.to_json();
  j["f1_count"] = f1_count;
  j["h_count"] = h_count;
  j["attachment_checks"] = attachment_checks;
  j["attachment_violations"] = attachment_violations;
  j["first_violation_time"] = first_violation_time;
  return j;
}

namespace {

// F^(2)_n truncated at the horizon. At step n + i the rightmost active
// particle (rank 0 when i = 1) must propose a length at least
// l_{n+i,-j} - c_j for every rank j >= i, c_j being the guaranteed distance
// of rank j to the left. Evaluated over the particles that exist then.
bool f2_holds(const LinkDriving& d, const LinkConstants& c, std::int64_t n, std::int64_t size_n,
              std::int64_t horizon) {
  for (std::int64_t i = 1; i <= horizon; ++i) {
    const std::int64_t t = n + i;
    const std::int64_t size = size_n + i - 1;
    std::int64_t lead = 0;
    std::int64_t from = 1;
    if (i > 1) {
      lead = d.nu(t, size);
      if (lead < 0) return false;
      from = i;
    }
    const double l = d.length(t, lead);
    if (d.exceeds(t, from, size, l, [&](std::int64_t j) { return c.c(j); }) >= 0) return false;
  }
  return true;
}

}  // namespace

LinksScan scan_links(const LinkDriving& d, const LinksConfig& cfg) {
  check_links_config(cfg);
  if (d.p() != cfg.p || d.mean_length() != cfg.mean_length)
    throw ConfigError("scan_links: driving and configuration disagree on p or the mean length");
  LinksScan out;
  out.constants = calibrate_links(cfg, d.seed() ^ 0x9E3779B97F4A7C15ull);
  const auto& k = out.constants;
  const double max_gap = k.b * (1.0 + cfg.epsilon);
  const double min_distance = k.a * (1.0 - cfg.epsilon);

  LinkState x;
  std::vector<double> abs_pos{0.0};
  abs_pos.reserve(static_cast<std::size_t>(cfg.steps + 1));
  double shift = 0.0;
  std::deque<std::int64_t> pending;
  std::vector<std::int64_t> confirmed;
  std::vector<std::int64_t> red;  // scratch: R_0 = n, R_1, ...

  const auto window = [&] {
    std::vector<double> v(static_cast<std::size_t>(cfg.depth + 1), 0.0);
    for (std::int64_t j = 0; j <= cfg.depth && j < static_cast<std::int64_t>(x.size()); ++j)
      v[static_cast<std::size_t>(cfg.depth - j)] = x.rank_position(static_cast<std::size_t>(j));
    return v;
  };

  std::vector<double> buffer;
  std::vector<double> cycle_trace;
  std::int64_t latest = -1;
  auto& taus = out.scan.taus;

  const auto h_holds = [&](std::int64_t n) {
    red.assign(1, n);
    for (auto it = pending.rbegin(); it != pending.rend() && static_cast<std::int64_t>(red.size()) <= cfg.blocks; ++it)
      red.push_back(*it);
    for (auto it = confirmed.rbegin(); it != confirmed.rend() && static_cast<std::int64_t>(red.size()) <= cfg.blocks;
         ++it)
      red.push_back(*it);
    if (static_cast<std::int64_t>(red.size()) <= cfg.blocks) return false;
    for (std::size_t i = 0; i + 1 < red.size(); ++i) {
      if (static_cast<double>(red[i] - red[i + 1]) > max_gap) return false;
      if (abs_pos[static_cast<std::size_t>(red[i])] - abs_pos[static_cast<std::size_t>(red[i + 1])] < min_distance)
        return false;
    }
    return true;
  };

  for (std::int64_t n = 0; n <= cfg.steps; ++n) {
    if (n > 0) {
      const auto o = d.step(x, n - 1, n);
      if (o.h > 0.0) {
        shift += o.h;
        abs_pos.push_back(shift);
      } else {
        abs_pos.push_back(shift + o.h);
      }
      if (latest >= 0 && o.parent_id >= 0) {
        ++out.attachment_checks;
        if (o.parent_id < latest && out.attachment_violations++ == 0) out.first_violation_time = n;
      }
      const auto v = capped_nu(d, n, cfg.horizon);
      // F^(1)_m fails at lag n - m when nu_n >= n - m.
      while (!pending.empty() && pending.back() >= n - v) pending.pop_back();
      while (!pending.empty() && n - pending.front() >= cfg.horizon) {
        confirmed.push_back(pending.front());
        pending.pop_front();
      }
    }
    if (latest >= 0) {
      const auto w = window();
      buffer.insert(buffer.end(), w.begin(), w.end());
      cycle_trace.push_back(w.front());
    }
    const bool f1 = f1_holds(d, n, cfg.horizon);
    out.f1_count += f1;
    bool is_break = false;
    if (f1 && h_holds(n)) {
      ++out.h_count;
      ++out.scan.future_evaluations;
      is_break = f2_holds(d, k, n, static_cast<std::int64_t>(x.size()), cfg.horizon);
    }
    if (is_break) {
      if (latest >= 0) {
        regen::Cycle c;
        c.k = static_cast<std::int64_t>(out.scan.cycles.size());
        c.tau_start = latest;
        c.tau_end = n;
        c.trace = std::move(cycle_trace);
        out.scan.cycles.push_back(std::move(c));
        out.traces.push_back(std::move(buffer));
      }
      buffer.clear();
      cycle_trace.clear();
      out.at_breaks.push_back(window());
      taus.push_back(n);
      latest = n;
    }
    pending.push_back(n);
  }
  out.scan.horizon = cfg.horizon;
  out.scan.max_horizon_used = cfg.horizon;
  out.scan.truncated_breaks = static_cast<std::int64_t>(taus.size());
  if (taus.empty())
    out.scan.diagnostic = "no break times in [0, " + std::to_string(cfg.steps) + "]";
  else if (out.scan.cycles.empty())
    out.scan.diagnostic = "a single break time; no complete cycle";
  return out;
}

nlohmann::json LinksBudget::to_json() const {
  return {{"f2_factors", f2_factors}, {"log10_f2", log10_f2}, {"block_pass", block_pass},
          {"blocks_seen", blocks_seen}, {"log10_h", log10_h}, {"log10_f1", log10_f1}, {"log10_a", log10_a()}};
}

LinksBudget links_budget(const LinksConfig& cfg, std::uint64_t seed, std::int64_t samples, std::int64_t size) {
  check_links_config(cfg);
  if (samples < 1 || size < cfg.horizon + 1) throw ConfigError("links_budget: need samples >= 1 and size > horizon");
  LinksBudget out;
  const auto k = calibrate_links(cfg, seed ^ 0x9E3779B97F4A7C15ull);
  const LinkDriving d(seed, cfg.p, cfg.mean_length);
  const double log10_zero = std::log10(0.5 / static_cast<double>(samples));
  for (std::int64_t i = 1; i <= cfg.horizon; ++i) {
    std::int64_t ok = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
      const std::int64_t t = s * (cfg.horizon + 1) + i;
      const std::int64_t lead = i > 1 ? d.nu(t, size + i - 1) : 0;
      if (lead < 0) continue;
      const double l = d.length(t, lead);
      ok += d.exceeds(t, i > 1 ? i : 1, size + i - 1, l, [&](std::int64_t j) { return k.c(j); }) < 0;
    }
    const double p = static_cast<double>(ok) / static_cast<double>(samples);
    out.f2_factors.push_back(p);
    out.log10_f2 += ok > 0 ? std::log10(p) : log10_zero;
  }

  // Block pass rate along a path driven by an independent seed.
  const LinkDriving path(seed + 1, cfg.p, cfg.mean_length);
  LinkState x;
  std::vector<double> abs_pos{0.0};
  double shift = 0.0;
  for (std::int64_t n = 1; n <= cfg.calibration_steps; ++n) {
    const auto o = path.step(x, n - 1, n);
    if (o.h > 0.0) shift += o.h;
    abs_pos.push_back(o.h > 0.0 ? shift : shift + o.h);
  }
  std::int64_t prev = -1, pass = 0;
  for (std::int64_t m = 0; m + cfg.horizon <= cfg.calibration_steps; ++m) {
    if (!f1_holds(path, m, cfg.horizon)) continue;
    if (prev >= 0) {
      ++out.blocks_seen;
      pass += static_cast<double>(m - prev) <= k.b * (1.0 + cfg.epsilon) &&
              abs_pos[static_cast<std::size_t>(m)] - abs_pos[static_cast<std::size_t>(prev)] >= k.a * (1.0 - cfg.epsilon);
    }
    prev = m;
  }
  if (out.blocks_seen == 0) throw DomainError("links_budget: no F^(1) blocks along the calibration path");
  out.block_pass = static_cast<double>(pass) / static_cast<double>(out.blocks_seen);
  out.log10_h = pass > 0 ? static_cast<double>(cfg.blocks) * std::log10(out.block_pass) : -INFINITY;
  out.log10_f1 = std::log10(f1_probability(cfg.p, cfg.horizon));
  return out;
}

}  // namespace regenlab::bins
