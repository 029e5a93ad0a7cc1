#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>

#include "regenlab/contact/contact.hpp"
#include "regenlab/core/parallel.hpp"
#include "regenlab/errors.hpp"
#include "scan_detail.hpp"

namespace regenlab::contact {

void DescendantLaw::validate() const {
  for (double w : {none, left, right, both})
    if (!(w >= 0.0) || w > 1.0) throw ConfigError("descendant law: probabilities must lie in [0, 1]");
  if (std::abs(none + left + right + both - 1.0) > 1e-12)
    throw ConfigError("descendant law: probabilities must sum to 1");
}

DescendantLaw DescendantLaw::independent(double b) {
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("descendant law: b must lie in [0, 1]");
  return {(1 - b) * (1 - b), b * (1 - b), (1 - b) * b, b * b};
}

DescendantLaw DescendantLaw::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("descendant law must be an object");
  if (j.contains("b")) {
    for (const auto& [k, v] : j.items())
      if (k != "b") throw ConfigError("descendant law: unexpected key '" + k + "'");
    return independent(j.at("b").get<double>());
  }
  DescendantLaw law{0, 0, 0, 0};
  for (const auto& [k, v] : j.items()) {
    if (k == "none") law.none = v.get<double>();
    else if (k == "left") law.left = v.get<double>();
    else if (k == "right") law.right = v.get<double>();
    else if (k == "both") law.both = v.get<double>();
    else throw ConfigError("descendant law: unexpected key '" + k + "'");
  }
  law.validate();
  return law;
}

nlohmann::json DescendantLaw::to_json() const {
  return {{"none", none}, {"left", left}, {"right", right}, {"both", both}};
}

ContactDriving::ContactDriving(std::uint64_t seed, DescendantLaw law, double q, std::int64_t offset)
    : rng_(seed), law_(law), q_(q), offset_(offset) {
  law_.validate();
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("contact: q must lie in [0, 1]");
  const double pl = law_.p_left();
  t_left_ = core::CounterRng::threshold_of(pl);
  t_right_if_left_ = core::CounterRng::threshold_of(pl > 0 ? law_.both / pl : 0.0);
  t_right_if_not_ = core::CounterRng::threshold_of(pl < 1 ? law_.right / (1 - pl) : 0.0);
  t_immune_ = core::CounterRng::threshold_of(q);
  independent_ = t_right_if_left_ == t_right_if_not_;
}

ContactDriving ContactDriving::from_stream(const core::DrivingStream& s, DescendantLaw law, double q) {
  return ContactDriving(s.seed(), law, q, s.origin_offset());
}

std::uint64_t ContactDriving::left_bits(std::int64_t n, std::uint64_t block) const noexcept {
  return rng_.bernoulli_word(offset_ + n, static_cast<std::uint32_t>(block), core::Tag::kLeft, t_left_);
}

std::uint64_t ContactDriving::right_bits(std::int64_t n, std::uint64_t block) const noexcept {
  const auto lane = static_cast<std::uint32_t>(block);
  const std::uint64_t given_left = rng_.bernoulli_word(offset_ + n, lane, core::Tag::kRight, t_right_if_left_);
  if (independent_) return given_left;
  const std::uint64_t l = left_bits(n, block);
  const std::uint64_t given_not = rng_.bernoulli_word(offset_ + n, lane, core::Tag::kCategorical, t_right_if_not_);
  return (l & given_left) | (~l & given_not);
}

std::uint64_t ContactDriving::immune_bits(std::int64_t n, std::uint64_t block) const noexcept {
  return rng_.bernoulli_word(offset_ + n, static_cast<std::uint32_t>(block), core::Tag::kImmune, t_immune_);
}

ContactDriving ContactDriving::shift(std::int64_t k) const {
  return ContactDriving(rng_.seed(), law_, q_, offset_ + k);
}

// ---------------------------------------------------------------------------

std::size_t LatticeConfig2::count() const noexcept {
  std::size_t c = 0;
  for (auto w : occupied) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::int64_t LatticeConfig2::leftmost() const {
  if (extinct()) throw DomainError("leftmost of an extinct configuration");
  const std::size_t w = occupied.size() - 1;
  const int hb = 63 - std::countl_zero(occupied[w]);
  return r - 2 * (static_cast<std::int64_t>(w) * 64 + hb);
}

bool LatticeConfig2::contains(std::int64_t x) const noexcept {
  if (extinct() || x > r || ((r - x) & 1)) return false;
  const auto j = static_cast<std::uint64_t>((r - x) / 2);
  if (j / 64 >= occupied.size()) return false;
  return (occupied[j / 64] >> (j % 64)) & 1u;
}

std::vector<std::int64_t> LatticeConfig2::sites() const {
  std::vector<std::int64_t> out;
  for (std::size_t w = occupied.size(); w-- > 0;) {
    std::uint64_t bits = occupied[w];
    while (bits) {
      const int b = 63 - std::countl_zero(bits);
      bits &= ~(std::uint64_t{1} << b);
      out.push_back(r - 2 * (static_cast<std::int64_t>(w) * 64 + b));
    }
  }
  return out;
}

LatticeConfig2 LatticeConfig2::single_site(std::int64_t x) { return LatticeConfig2{x, {1u}, 0}; }

LatticeConfig2 LatticeConfig2::from_sites(const std::vector<std::int64_t>& sites) {
  LatticeConfig2 c;
  if (sites.empty()) return c;
  c.r = *std::max_element(sites.begin(), sites.end());
  for (auto x : sites) {
    if ((c.r - x) & 1) throw ConfigError("two-state configuration: sites must share one parity");
    const auto j = static_cast<std::uint64_t>((c.r - x) / 2);
    if (c.occupied.size() <= j / 64) c.occupied.resize(j / 64 + 1, 0);
    c.occupied[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return c;
}

void step2_inplace(LatticeConfig2& x, const ContactDriving& d, std::int64_t n, std::int64_t width_cap) {
  if (x.extinct()) throw ContractError("step2: configuration is extinct");
  auto& occ = x.occupied;
  const std::size_t words = occ.size();
  // Children of bit j land at k = j (right) and k = j + 1 (left), where k
  // indexes site r + 1 - 2k.
  std::vector<std::uint64_t> k(words + 1, 0);
  for (std::size_t b = 0; b < words; ++b) {
    const std::uint64_t j = occ[b];
    if (j == 0) continue;
    const std::uint64_t right = j & d.right_bits(n + 1, b);
    const std::uint64_t left = j & d.left_bits(n + 1, b);
    k[b] |= right | (left << 1);
    k[b + 1] |= left >> 63;
  }
  std::size_t first = 0;
  while (first < k.size() && k[first] == 0) ++first;
  if (first == k.size()) {
    occ.clear();
    return;
  }
  const int tz = std::countr_zero(k[first]);
  const std::int64_t k0 = static_cast<std::int64_t>(first) * 64 + tz;
  x.r = x.r + 1 - 2 * k0;
  const std::size_t out_words = k.size() - first;
  occ.assign(out_words, 0);
  for (std::size_t i = 0; i < out_words; ++i) {
    const std::uint64_t lo = k[first + i] >> tz;
    const std::uint64_t hi = (tz && first + i + 1 < k.size()) ? k[first + i + 1] << (64 - tz) : 0;
    occ[i] = lo | hi;
  }
  while (!occ.empty() && occ.back() == 0) occ.pop_back();
  // Width cap: keep offsets j with 2j <= width_cap.
  const auto max_j = static_cast<std::uint64_t>(width_cap / 2);
  if (occ.size() * 64 > max_j + 1) {
    const std::size_t keep_words = max_j / 64 + 1;
    bool dropped = false;
    if (occ.size() > keep_words) {
      for (std::size_t i = keep_words; i < occ.size(); ++i) dropped |= occ[i] != 0;
      occ.resize(keep_words);
    }
    const int keep_bits = static_cast<int>(max_j % 64) + 1;
    if (keep_bits < 64) {
      const std::uint64_t mask = (std::uint64_t{1} << keep_bits) - 1;
      dropped |= (occ.back() & ~mask) != 0;
      occ.back() &= mask;
    }
    while (!occ.empty() && occ.back() == 0) occ.pop_back();
    if (dropped) ++x.truncations;
  }
}

LatticeConfig2 step2(const LatticeConfig2& x, const ContactDriving& d, std::int64_t n, std::int64_t width_cap) {
  LatticeConfig2 y = x;
  step2_inplace(y, d, n, width_cap);
  return y;
}

namespace {
void check_probe_horizon(std::int64_t T) {
  if (T < 1) throw ConfigError("survival probe: T must be >= 1");
  if (2 * T > kDefaultWidthCap) throw ConfigError("survival probe: width cap must be at least 2T");
}
}  // namespace

Probe survival_probe2(const ContactDriving& d, std::int64_t n, std::int64_t T, bool record_path) {
  check_probe_horizon(T);
  Probe p;
  auto x = LatticeConfig2::single_site(0);
  if (record_path) p.path.push_back(0);
  for (std::int64_t lag = 1; lag <= T; ++lag) {
    step2_inplace(x, d, n + lag - 1);
    if (x.extinct()) {
      p.verdict = regen::FutureVerdict::fails(lag);
      return p;
    }
    if (record_path) p.path.push_back(x.r);
  }
  p.verdict = regen::FutureVerdict::undecided(T);
  return p;
}

regen::FutureVerdict survival_probe(const ContactDriving& d, std::int64_t n, std::int64_t T) {
  return survival_probe2(d, n, T).verdict;
}

regen::FutureEventSpec survival_event2(DescendantLaw law) {
  law.validate();
  return regen::FutureEventSpec("contact2_survival", [law](const core::DrivingStream& s, std::int64_t n) {
    struct State {
      ContactDriving d;
      LatticeConfig2 x;
    };
    auto st = std::make_shared<State>(State{ContactDriving::from_stream(s, law), LatticeConfig2::single_site(0)});
    return [st, n](std::int64_t lag) {
      step2_inplace(st->x, st->d, n + lag - 1);
      return st->x.extinct() ? regen::Progress::kFails : regen::Progress::kContinue;
    };
  });
}

// ---------------------------------------------------------------------------

bool SurvivalEstimate::supercritical() const noexcept { return p_hat - 3.0 * std_error > 0.0 && shrinking; }

nlohmann::json SurvivalEstimate::to_json() const {
  nlohmann::json j{{"horizons", horizons},  {"fraction", fraction},         {"samples", samples},
                   {"p_hat", p_hat},        {"std_error", std_error},       {"extrapolated", extrapolated},
                   {"shrinking", shrinking}, {"supercritical", supercritical()}};
  if (tail) j["tail"] = tail->to_json();
  return j;
}

namespace {

template <class ProbeFn>
SurvivalEstimate estimate_survival(std::vector<std::int64_t> horizons, std::int64_t samples, ProbeFn probe) {
  if (horizons.empty() || samples < 1) throw ConfigError("survival estimate: need horizons and samples");
  std::sort(horizons.begin(), horizons.end());
  const std::int64_t T = horizons.back();
  std::vector<std::int64_t> death(static_cast<std::size_t>(samples), -1);
  core::parallel_for(death.size(), [&](std::size_t i) {
    const auto v = probe(static_cast<std::int64_t>(i) * (T + 1), T);
    death[i] = v.is_fails() ? v.horizon_used : -1;
  });
  SurvivalEstimate e;
  e.horizons = horizons;
  e.samples = samples;
  for (auto h : horizons) {
    std::int64_t alive = 0;
    for (auto t : death) alive += (t < 0 || t > h);
    e.fraction.push_back(static_cast<double>(alive) / static_cast<double>(samples));
  }
  e.p_hat = e.fraction.back();
  e.std_error = std::sqrt(e.p_hat * (1 - e.p_hat) / static_cast<double>(samples));
  e.extrapolated = e.p_hat;
  e.shrinking = true;
  if (e.fraction.size() >= 3) {
    const std::size_t m = e.fraction.size();
    const double d1 = e.fraction[m - 3] - e.fraction[m - 2];
    const double d2 = e.fraction[m - 2] - e.fraction[m - 1];
    e.shrinking = d2 <= d1;
    if (d1 > d2 && d1 - d2 > 0) e.extrapolated = e.fraction[m - 1] - d2 * d2 / (d1 - d2);
  }
  for (auto t : death)
    if (t > 0) e.extinction_times.push_back(t);
  try {
    e.tail = stats::geometric_tail_fit(e.extinction_times);
  } catch (const FitError&) {
    e.tail.reset();
  }
  return e;
}

}  // namespace

SurvivalEstimate estimate_survival2(const ContactDriving& d, std::vector<std::int64_t> horizons,
                                    std::int64_t samples) {
  return estimate_survival(std::move(horizons), samples,
                           [&](std::int64_t n, std::int64_t T) { return survival_probe(d, n, T); });
}

SurvivalEstimate estimate_survival3(const ContactDriving& d, std::vector<std::int64_t> horizons,
                                    std::int64_t samples) {
  return estimate_survival(std::move(horizons), samples,
                           [&](std::int64_t n, std::int64_t T) { return survival_probe3(d, n, T).verdict; });
}

// ---------------------------------------------------------------------------


ContactScan kuczek_scan(const ContactDriving& d, std::int64_t N, std::int64_t T) {
  if (N < 1) throw ConfigError("kuczek_scan: N must be >= 1");
  ContactScan out;
  std::vector<std::int64_t> last_path;
  const auto probe = [&](std::int64_t n, std::int64_t h) { return survival_probe2(d, n, h, true); };
  std::int64_t n = 0;
  while (n <= N) {
    auto p = probe(n, T);
    ++out.probes;
    out.scan.max_horizon_used = std::max(out.scan.max_horizon_used, p.verdict.horizon_used);
    if (p.verdict.is_fails()) {
      n += p.verdict.horizon_used;
      continue;
    }
    if (!out.scan.taus.empty()) detail::close_cycle(out, out.scan.taus.back(), n, std::move(last_path), probe);
    out.scan.taus.push_back(n);
    last_path = std::move(p.path);
    ++n;
  }
  detail::finish_scan(out, N, T);
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json SpeedClt::to_json() const {
  return {{"speed", speed.to_json()}, {"sigma2", sigma2},   {"window", window},
          {"var_n", var_n},           {"var_2n", var_2n},   {"variance_change", variance_change},
          {"clt_stable", clt_stable()}};
}

SpeedClt speed_and_clt(const std::vector<regen::Cycle>& cycles, std::int64_t window) {
  if (cycles.size() < 1000) throw DomainError("speed_and_clt: need at least 1000 cycles");
  std::vector<double> gaps, rewards;
  std::vector<double> path{0.0};
  for (const auto& c : cycles) {
    if (c.trace.empty()) throw DomainError("speed_and_clt: cycle without trace");
    gaps.push_back(static_cast<double>(c.gap()));
    rewards.push_back(c.trace.back());
    const double base = path.back();
    for (double v : c.trace) path.push_back(base + v);
  }
  SpeedClt out;
  out.speed = stats::renewal_reward(gaps, rewards);
  const double mu = out.speed.rate;
  long double s = 0.0L;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const long double dlt = rewards[i] - mu * gaps[i];
    s += dlt * dlt;
  }
  out.sigma2 = static_cast<double>(s / static_cast<long double>(gaps.size() - 1)) / stats::mean(gaps);

  const auto len = static_cast<std::int64_t>(path.size()) - 1;
  const std::int64_t n = window > 0 ? window : std::max<std::int64_t>(8, len / 1024);
  if (2 * n >= len) throw DomainError("speed_and_clt: window too long for the concatenated path");
  out.window = n;
  const auto variance_at = [&](std::int64_t w) {
    long double sum = 0.0L, sq = 0.0L;
    std::int64_t count = 0;
    for (std::int64_t t = 0; t + 2 * n <= len; ++t) {
      const double v = (path[static_cast<std::size_t>(t + w)] - path[static_cast<std::size_t>(t)] -
                        static_cast<double>(w) * mu) / std::sqrt(static_cast<double>(w));
      sum += v;
      sq += static_cast<long double>(v) * v;
      ++count;
    }
    const long double m = sum / count;
    return static_cast<double>((sq - count * m * m) / (count - 1));
  };
  out.var_n = variance_at(n);
  out.var_2n = variance_at(2 * n);
  out.variance_change = out.var_n > 0 ? std::abs(out.var_2n - out.var_n) / out.var_n : (out.var_2n > 0 ? 1.0 : 0.0);
  return out;
}

nlohmann::json ReplayReport::to_json() const {
  return {{"identity", identity},
          {"checks", checks},
          {"violations", violations},
          {"first_violation", first_violation},
          {"pass", pass()}};
}

}  // namespace regenlab::contact
