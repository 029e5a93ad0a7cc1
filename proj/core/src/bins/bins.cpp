#include "regenlab/bins/bins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regenlab/errors.hpp"

namespace regenlab::bins {

namespace {

std::int64_t as_rank(core::Symbol s) {
  if (!(s >= 1.0) || s != std::floor(s) || s > 9.0e15)
    throw DomainError("bins: driving symbol " + std::to_string(s) + " is not a positive integer");
  return static_cast<std::int64_t>(s);
}

// P(xi = v) for an integer v under the declared law.
double mass_at(const core::Law& law, std::int64_t v) {
  return core::law_cdf(law, static_cast<double>(v)) - core::law_cdf(law, static_cast<double>(v) - 0.5);
}

std::int64_t min_gap_of(const regen::ScanResult& s) {
  std::int64_t g = 0;
  for (std::size_t i = 1; i < s.taus.size(); ++i) {
    const auto d = s.taus[i] - s.taus[i - 1];
    g = g == 0 ? d : std::min(g, d);
  }
  return g;
}

// Scans with the generic scanner, then replays the path to collect display
// traces and check the promised X_n(-depth) at every H_n.
BinsScan scan_with(const core::DrivingStream& stream, const BinState& initial, std::int64_t depth,
                   const regen::PastEventSpec& h, const regen::FutureEventSpec& f, const regen::BreakConfig& breaks,
                   std::int64_t promised) {
  if (depth < 0) throw ConfigError("bins: depth must be >= 0");
  if (!initial.valid()) throw ConfigError("bins: invalid initial configuration");
  BinsAdapter adapter(initial);
  BinsScan out;
  out.depth = depth;
  out.scan = regen::scan_break_times(adapter, stream, h, f, breaks,
                                     [](double now, double) { return now; });
  out.min_gap = min_gap_of(out.scan);

  BinsAdapter replay(initial);
  replay.reset(stream);
  std::size_t next = 0;
  const auto& cycles = out.scan.cycles;
  out.display.resize(cycles.size());
  for (std::int64_t n = 0; n <= breaks.max_time; ++n) {
    if (n > 0) replay.advance();
    if (h(regen::History(n, stream, &replay))) {
      ++out.h_count;
      const auto v = replay.state().display(depth);
      if (std::any_of(v.begin(), v.end(), [&](std::int64_t c) { return c != promised; })) ++out.h_violations;
    }
    while (next < cycles.size() && n > cycles[next].tau_end) ++next;
    if (next < cycles.size() && n > cycles[next].tau_start) {
      const auto v = replay.state().display(depth);
      out.display[next].insert(out.display[next].end(), v.begin(), v.end());
    }
  }
  return out;
}

}  // namespace

std::int64_t BinState::at(std::int64_t j) const noexcept {
  if (j < 0 || j > extent()) return 0;
  return counts[counts.size() - 1 - static_cast<std::size_t>(j)];
}

std::vector<std::int64_t> BinState::display(std::int64_t k) const {
  std::vector<std::int64_t> v(static_cast<std::size_t>(k + 1));
  for (std::int64_t j = 0; j <= k; ++j) v[static_cast<std::size_t>(k - j)] = at(j);
  return v;
}

bool BinState::valid() const noexcept {
  if (counts.empty()) return false;
  std::int64_t s = 0;
  for (auto c : counts) {
    if (c <= 0) return false;
    s += c;
  }
  return s == total;
}

BinState BinState::from_counts(std::vector<std::int64_t> counts) {
  BinState x;
  x.counts = std::move(counts);
  x.total = std::accumulate(x.counts.begin(), x.counts.end(), std::int64_t{0});
  if (!x.valid()) throw ConfigError("bins: counts must be a nonempty vector of positive integers");
  return x;
}

void step_bins_inplace(BinState& x, std::int64_t xi) {
  if (xi < 1) throw DomainError("step_bins: xi must be >= 1");
  ++x.total;
  if (xi <= x.counts.back()) {
    x.counts.push_back(1);
    return;
  }
  // Cumulative count from the top; the chosen particle sits in bin -(k+1)
  // and its offspring lands in bin -k.
  std::int64_t cum = 0;
  for (std::size_t i = x.counts.size(); i-- > 1;) {
    cum += x.counts[i];
    if (xi <= cum + x.counts[i - 1]) {
      ++x.counts[i];
      return;
    }
  }
  ++x.counts.front();
}

BinState step_bins(const BinState& x, std::int64_t xi) {
  BinState y = x;
  step_bins_inplace(y, xi);
  return y;
}

void BinsAdapter::reset(const core::DrivingStream& stream) {
  stream_ = &stream;
  state_ = initial_;
  n_ = 0;
}

void BinsAdapter::advance() {
  ++n_;
  step_bins_inplace(state_, as_rank(stream_->sample_at(n_)));
}

regen::FutureEventSpec ladder_future(std::int64_t base) {
  if (base < 1) throw ConfigError("ladder_future: base must be >= 1");
  return regen::FutureEventSpec(
      "ladder(" + std::to_string(base) + ")",
      [base](const core::DrivingStream& s, std::int64_t n) -> regen::FutureStepper {
        return [&s, n, base](std::int64_t lag) {
          return s.sample_at(n + lag) <= static_cast<double>(base + lag - 1) ? regen::Progress::kContinue
                                                                              : regen::Progress::kFails;
        };
      });
}

regen::PastEventSpec ones_run(std::int64_t k) {
  if (k < 0) throw ConfigError("ones_run: k must be >= 0");
  return {"ones(" + std::to_string(k + 1) + ")", [k](const regen::History& h) {
            if (h.n() - k < 1) return false;
            for (std::int64_t i = h.n() - k; i <= h.n(); ++i)
              if (h.xi(i) != 1.0) return false;
            return true;
          }};
}

BinsScan scan_bins_basic(const core::DrivingStream& stream, const BasicConfig& cfg) {
  if (!(mass_at(stream.law(), 1) > 0.0))
    throw ConfigError("scan_bins_basic: P(xi = 1) = 0; use the mutually prime scanner (bins prime)");
  return scan_with(stream, cfg.initial, cfg.depth, ones_run(cfg.depth), ladder_future(1), cfg.breaks, 1);
}

double ladder_occurrence(const core::DrivingStream& stream, std::int64_t base, std::int64_t horizon,
                         std::int64_t samples) {
  if (horizon < 1 || samples < 1) throw ConfigError("ladder_occurrence: horizon and samples must be >= 1");
  std::int64_t hits = 0;
  for (std::int64_t n = 0; n < samples; ++n) {
    bool ok = true;
    for (std::int64_t l = 1; ok && l <= horizon; ++l) ok = stream.sample_at(n + l) <= static_cast<double>(base + l - 1);
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double ladder_probability(const core::Law& law, std::int64_t base, std::int64_t horizon) {
  double p = 1.0;
  for (std::int64_t i = 1; i <= horizon; ++i) p *= core::law_cdf(law, static_cast<double>(base + i - 1));
  return p;
}

// ------------------------------------------------------------ prime ranks

nlohmann::json ChraWord::to_json() const {
  return {{"i1", i1}, {"i2", i2}, {"m", m}, {"word", word}, {"block", block}, {"profiles_checked", profiles_checked}};
}

std::int64_t replay_block(BinState x, const std::vector<std::int64_t>& block) {
  for (auto xi : block) step_bins_inplace(x, xi);
  return x.top();
}

namespace {

void compositions(std::int64_t total, std::vector<std::int64_t>& prefix, std::vector<std::vector<std::int64_t>>& out) {
  if (total == 0) {
    out.push_back(prefix);
    return;
  }
  for (std::int64_t part = 1; part <= total; ++part) {
    prefix.push_back(part);
    compositions(total - part, prefix, out);
    prefix.pop_back();
  }
}

// Every configuration agrees with one of these on what a block of draws
// <= i2 can see: top-first compositions of i2 (the last part standing for
// "at least" that many, with more particles below) and every complete
// configuration holding fewer than i2 particles.
std::vector<BinState> profiles(std::int64_t i2) {
  std::vector<std::vector<std::int64_t>> tops;
  std::vector<std::int64_t> prefix;
  for (std::int64_t t = 1; t <= i2; ++t) compositions(t, prefix, tops);
  std::vector<BinState> out;
  out.reserve(tops.size());
  for (auto& c : tops) {
    std::reverse(c.begin(), c.end());
    out.push_back(BinState::from_counts(std::move(c)));
  }
  return out;
}

}  // namespace

ChraWord find_chra_word(std::int64_t i1, std::int64_t i2, std::int64_t max_length) {
  if (!(1 < i1 && i1 < i2)) throw ConfigError("find_chra_word: need 1 < i1 < i2");
  if (std::gcd(i1, i2) != 1) throw ConfigError("find_chra_word: i1 and i2 must be mutually prime");
  if (max_length < 0 || max_length > 30) throw ConfigError("find_chra_word: max_length must lie in [0, 30]");
  if (i2 > 16) throw ConfigError("find_chra_word: i2 > 16 exceeds the profile budget");
  const auto starts = profiles(i2);
  ChraWord w;
  w.i1 = i1;
  w.i2 = i2;
  for (std::int64_t len = 0; len <= max_length; ++len) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      std::vector<std::int64_t> block{i2};
      for (std::int64_t l = len - 1; l >= 0; --l) block.push_back(((bits >> l) & 1u) ? i2 : i1);
      block.push_back(i2);
      bool ok = true;
      for (const auto& s : starts) {
        ++w.profiles_checked;
        if (replay_block(s, block) < i1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        w.m = len + 1;
        w.block = block;
        w.word.assign(block.begin() + 1, block.end() - 1);
        return w;
      }
    }
  }
  throw DomainError("find_chra_word: no word of length <= " + std::to_string(max_length) + " for (" +
                    std::to_string(i1) + ", " + std::to_string(i2) + ")");
}

regen::PastEventSpec prime_past_event(const ChraWord& w, std::int64_t r) {
  return {"prime(" + std::to_string(w.i1) + "," + std::to_string(w.i2) + ")", [w, r](const regen::History& h) {
            const std::int64_t n = h.n();
            if (n - r - w.m < 1) return false;
            for (std::int64_t l = 1; l <= r; ++l)
              if (h.xi(n + 1 - l) != static_cast<double>(w.i1)) return false;
            const std::int64_t start = n - r - w.m;
            for (std::size_t i = 0; i < w.block.size(); ++i)
              if (h.xi(start + static_cast<std::int64_t>(i)) != static_cast<double>(w.block[i])) return false;
            return true;
          }};
}

PrimeScan scan_bins_prime(const core::DrivingStream& stream, const PrimeConfig& cfg) {
  const auto& law = stream.law();
  if (mass_at(law, 1) > 0.0) throw ConfigError("scan_bins_prime: requires P(xi = 1) = 0");
  if (!(mass_at(law, cfg.i1) > 0.0) || !(mass_at(law, cfg.i2) > 0.0))
    throw ConfigError("scan_bins_prime: requires P(xi = i1) > 0 and P(xi = i2) > 0");
  PrimeScan out;
  out.word = find_chra_word(cfg.i1, cfg.i2, cfg.max_word_length);
  out.r = cfg.i1 * (cfg.depth + 1);
  out.exclusion = out.r + cfg.i2 - cfg.i1;
  out.bins = scan_with(stream, cfg.initial, cfg.depth, prime_past_event(out.word, out.r), ladder_future(cfg.i1),
                       cfg.breaks, cfg.i1);
  out.min_gap_ok = out.bins.scan.taus.size() < 2 || out.bins.min_gap > out.exclusion;
  return out;
}

double encode_display(const std::vector<std::int64_t>& v) {
  if (v.size() > 5) throw DomainError("encode_display: depth > 4");
  double code = 0.0, scale = 1.0;
  for (std::size_t i = v.size(); i-- > 0;) {
    if (v[i] < 0 || v[i] >= 1024) throw DomainError("encode_display: entry outside [0, 1024)");
    code += static_cast<double>(v[i]) * scale;
    scale *= 1024.0;
  }
  return code;
}

std::vector<double> display_marginal(const core::DrivingStream& stream, const BinState& initial, std::int64_t depth,
                                     std::int64_t from, std::int64_t count) {
  if (from < 0 || count < 1) throw ConfigError("display_marginal: need from >= 0 and count >= 1");
  BinsAdapter a(initial);
  a.reset(stream);
  for (std::int64_t n = 0; n < from; ++n) a.advance();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    a.advance();
    out.push_back(encode_display(a.state().display(depth)));
  }
  return out;
}

}  // namespace regenlab::bins
