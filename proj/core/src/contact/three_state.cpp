#include <algorithm>
#include <cmath>

#include "regenlab/contact/contact.hpp"
#include "regenlab/errors.hpp"
#include "scan_detail.hpp"

namespace regenlab::contact {

std::int8_t LatticeConfig3::at(std::int64_t x) const noexcept {
  if (x < lo) return 0;
  if (x > hi()) return -1;
  return states[static_cast<std::size_t>(x - lo)];
}

std::int64_t LatticeConfig3::leftmost() const {
  if (extinct) throw DomainError("leftmost of an extinct configuration");
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == 1) return lo + static_cast<std::int64_t>(i);
  throw InconsistencyError("three-state configuration has no infected site");
}

LatticeConfig3 LatticeConfig3::single_site() { return from_states(0, {1}); }

LatticeConfig3 LatticeConfig3::zminus(std::int64_t window) {
  if (window < 2) throw ConfigError("zminus: window must be >= 2");
  const std::int64_t lo = -(window - (window & 1));
  std::vector<std::int8_t> s(static_cast<std::size_t>(-lo + 1));
  for (std::int64_t x = lo; x <= 0; ++x) s[static_cast<std::size_t>(x - lo)] = (x & 1) ? 0 : 1;
  return from_states(lo, std::move(s));
}

LatticeConfig3 LatticeConfig3::from_states(std::int64_t lo, std::vector<std::int8_t> states) {
  LatticeConfig3 c;
  c.lo = lo;
  c.states = std::move(states);
  c.extinct = true;
  for (std::size_t i = c.states.size(); i-- > 0;) {
    const auto v = c.states[i];
    if (v < -1 || v > 1) throw ConfigError("three-state configuration: states must be -1, 0 or 1");
    if (v == 1 && c.extinct) {
      c.extinct = false;
      c.r = lo + static_cast<std::int64_t>(i);
    }
  }
  return c;
}

bool parity_holds(const LatticeConfig3& x, std::int64_t n) {
  for (std::size_t i = 0; i < x.states.size(); ++i)
    if (x.states[i] == 1 && ((n + x.lo + static_cast<std::int64_t>(i)) & 1)) return false;
  return true;
}

bool left_profile_holds(const LatticeConfig3& x) {
  if (x.extinct) return true;
  const std::int64_t l = x.leftmost();
  for (std::int64_t y = x.lo; y <= x.r; ++y) {
    const auto v = x.at(y);
    if (v == -1) return false;
    if (y < l && v != 0) return false;
  }
  return true;
}

void step3_inplace(LatticeConfig3& x, const ContactDriving& d, std::int64_t n, std::int64_t window) {
  if (x.extinct) throw ContractError("step3: configuration is extinct");
  const std::int64_t r = x.r;
  const std::int64_t l = x.leftmost();
  // Grow the window by one site on each side so every child is addressable.
  std::vector<std::int8_t> s(x.states.size() + 2);
  s.front() = 0;
  s.back() = -1;
  std::copy(x.states.begin(), x.states.end(), s.begin() + 1);
  const std::int64_t lo = x.lo - 1;
  const auto idx = [lo](std::int64_t y) { return static_cast<std::size_t>(y - lo); };

  std::vector<std::uint8_t> child(s.size(), 0);
  std::uint64_t block = ~std::uint64_t{0}, lbits = 0, rbits = 0;
  for (std::int64_t y = r; y >= l; y -= 2) {
    if (s[idx(y)] != 1) continue;
    const auto j = static_cast<std::uint64_t>((r - y) / 2);
    if (j / 64 != block) {
      block = j / 64;
      lbits = d.left_bits(n + 1, block);
      rbits = d.right_bits(n + 1, block);
    }
    if ((lbits >> (j % 64)) & 1u) child[idx(y - 1)] = 1;
    if ((rbits >> (j % 64)) & 1u) child[idx(y + 1)] = 1;
    s[idx(y)] = 0;
  }

  // Immunity draws are indexed from the rightmost child, ymax.
  std::int64_t ymax = 0;
  bool any = false;
  for (std::size_t i = child.size(); i-- > 0;)
    if (child[i]) {
      ymax = lo + static_cast<std::int64_t>(i);
      any = true;
      break;
    }
  block = ~std::uint64_t{0};
  std::uint64_t ibits = 0;
  for (std::int64_t y = ymax; any && y >= l - 1; y -= 2) {
    if (!child[idx(y)]) continue;
    auto& v = s[idx(y)];
    if (v == -1) {
      v = 1;
      continue;
    }
    const auto j = static_cast<std::uint64_t>((ymax - y) / 2);
    if (j / 64 != block) {
      block = j / 64;
      ibits = d.immune_bits(n + 1, block);
    }
    v = ((ibits >> (j % 64)) & 1u) ? 1 : 0;
  }
  std::int64_t r_new = 0;
  const bool had_children = any;
  any = false;
  for (std::int64_t y = ymax; had_children && y >= l - 1; y -= 2)
    if (s[idx(y)] == 1) {
      r_new = y;
      any = true;
      break;
    }
  if (!any) {
    x.extinct = true;
    x.lo = lo;
    x.states = std::move(s);
    return;
  }

  // Trim: leading 0s and trailing -1s carry no information.
  std::size_t first = 0, last = s.size();
  while (first < last && s[first] == 0) ++first;
  while (last > first && s[last - 1] == -1) --last;
  std::int64_t new_lo = lo + static_cast<std::int64_t>(first);
  if (window > 0 && r_new - new_lo > window) {
    const std::size_t cut = static_cast<std::size_t>(r_new - window - lo);
    bool dropped = false;
    for (std::size_t i = first; i < cut; ++i) dropped |= s[i] == 1;
    if (dropped) ++x.truncations;
    first = cut;
    new_lo = r_new - window;
  }
  x.states.assign(s.begin() + static_cast<std::ptrdiff_t>(first), s.begin() + static_cast<std::ptrdiff_t>(last));
  x.lo = new_lo;
  x.r = r_new;
  // Every infected site may have been cut; the window is then all 0 and -1.
  if (std::find(x.states.begin(), x.states.end(), std::int8_t{1}) == x.states.end()) x.extinct = true;
}

LatticeConfig3 step3(const LatticeConfig3& x, const ContactDriving& d, std::int64_t n, std::int64_t window) {
  LatticeConfig3 y = x;
  step3_inplace(y, d, n, window);
  return y;
}

Probe survival_probe3(const ContactDriving& d, std::int64_t n, std::int64_t T, bool record_path) {
  if (T < 1) throw ConfigError("survival probe: T must be >= 1");
  Probe p;
  auto x = LatticeConfig3::single_site();
  if (record_path) p.path.push_back(0);
  for (std::int64_t lag = 1; lag <= T; ++lag) {
    step3_inplace(x, d, n + lag - 1);
    if (x.extinct) {
      p.verdict = regen::FutureVerdict::fails(lag);
      return p;
    }
    if (record_path) p.path.push_back(x.r);
  }
  p.verdict = regen::FutureVerdict::undecided(T);
  return p;
}

ContactScan record_scan3(const ContactDriving& d, std::int64_t N, std::int64_t T, std::int64_t window) {
  if (N < 1) throw ConfigError("record_scan3: N must be >= 1");
  if (T < 1) throw ConfigError("record_scan3: T must be >= 1");
  const std::int64_t w = window > 0 ? window : std::max<std::int64_t>(2 * T + 2, 4096);
  ContactScan out;
  out.rbar.reserve(static_cast<std::size_t>(N + 1));
  auto zbar = LatticeConfig3::zminus(w);
  out.rbar.push_back(zbar.r);
  std::int64_t best = zbar.r;
  std::int64_t resume = 0;
  std::vector<std::int64_t> last_path;
  const auto probe = [&](std::int64_t n, std::int64_t h) { return survival_probe3(d, n, h, true); };
  for (std::int64_t n = 0; n <= N; ++n) {
    if (n > 0) {
      step3_inplace(zbar, d, n - 1, w);
      if (zbar.extinct) throw InconsistencyError("record_scan3: the Z_- window lost every infected site");
      out.rbar.push_back(zbar.r);
    }
    const bool record = zbar.r >= best;
    best = std::max(best, zbar.r);
    if (!record || n < resume) continue;
    auto p = probe(n, T);
    ++out.probes;
    out.scan.max_horizon_used = std::max(out.scan.max_horizon_used, p.verdict.horizon_used);
    if (p.verdict.is_fails()) {
      resume = n + p.verdict.horizon_used;
      continue;
    }
    if (!out.scan.taus.empty()) detail::close_cycle(out, out.scan.taus.back(), n, std::move(last_path), probe);
    out.scan.taus.push_back(n);
    last_path = std::move(p.path);
    resume = n + 1;
  }
  out.window_truncations = zbar.truncations;
  detail::finish_scan(out, N, T);
  return out;
}

}  // namespace regenlab::contact
