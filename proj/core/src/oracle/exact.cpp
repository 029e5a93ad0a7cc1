#include "regenlab/oracle/exact.hpp"

#include <cmath>
#include <sstream>

#include "regenlab/core/parallel.hpp"
#include "regenlab/errors.hpp"

namespace regenlab::oracle {

namespace {

std::string join(const int* v, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join64(const std::vector<std::int64_t>& v, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string history_key(const std::vector<std::int64_t>& taus, std::size_t k, const std::vector<int>& x) {
  return "t=" + join64(taus, k + 1) + ";x=" + join(x.data(), static_cast<std::size_t>(taus[k]));
}

std::string segment_key(std::int64_t from, std::int64_t to, const std::vector<int>& x) {
  return "g=" + std::to_string(to - from) + ";x=" + join(x.data() + from, static_cast<std::size_t>(to - from));
}

std::int64_t segment_gap(const std::string& key) {
  if (key == "none") return -1;
  return std::stoll(key.substr(2, key.find(';') - 2));
}

std::int64_t history_last_tau(const std::string& key) {
  const auto semi = key.find(';');
  const auto comma = key.rfind(',', semi);
  const auto start = comma == std::string::npos || comma < 2 ? 2 : comma + 1;
  return std::stoll(key.substr(start, semi - start));
}

// Walks every sequence of `len` symbol indices in lexicographic order, with the
// first `fixed` indices pinned by `prefix`.
class Odometer {
 public:
  Odometer(std::size_t base, std::size_t len, std::vector<std::size_t> prefix)
      : base_(base), idx_(len, 0), fixed_(prefix.size()) {
    for (std::size_t i = 0; i < prefix.size(); ++i) idx_[i] = prefix[i];
  }
  const std::vector<std::size_t>& idx() const noexcept { return idx_; }
  // Advances; returns the lowest position that changed, or npos when done.
  std::size_t next() {
    for (std::size_t i = idx_.size(); i-- > fixed_;) {
      if (++idx_[i] < base_) return i;
      idx_[i] = 0;
    }
    return std::string::npos;
  }

 private:
  std::size_t base_;
  std::vector<std::size_t> idx_;
  std::size_t fixed_;
};

std::vector<std::int64_t> break_times(const std::vector<int>& x, int T, const TruncatedPast& h,
                                      const TruncatedFuture& f, int min_sep) {
  std::vector<std::int64_t> taus;
  for (int n = 0; n <= T; ++n) {
    if (!taus.empty() && n < taus.back() + min_sep) continue;
    if (!h(PastAccess(x.data(), n, h.window))) continue;
    if (!f(FutureAccess(x.data() + n, f.lookahead))) continue;
    taus.push_back(n);
  }
  return taus;
}

struct Accumulator {
  std::map<ExactLaw::Outcome, mpz_class> support;
  std::map<std::string, std::map<std::string, mpz_class>> histories;
  std::map<std::pair<std::int64_t, int>, mpz_class> after;
  std::uint64_t sequences = 0;

  void merge(Accumulator&& o) {
    for (auto& [k, v] : o.support) support[k] += v;
    for (auto& [k, m] : o.histories)
      for (auto& [s, v] : m) histories[k][s] += v;
    for (auto& [k, v] : o.after) after[k] += v;
    sequences += o.sequences;
  }
};

void check_guard(std::size_t base, int len, double guard) {
  const double count = std::pow(static_cast<double>(base), len);
  if (count > guard) {
    std::ostringstream os;
    os << "exact enumeration of " << base << "^" << len << " sequences exceeds the guard " << guard;
    throw SizeError(os.str());
  }
}

}  // namespace

Rational ExactLaw::total() const {
  Rational t = 0;
  for (const auto& [o, m] : support) t += m;
  return t;
}

std::map<std::int64_t, Rational> ExactLaw::gap_law() const {
  std::map<std::int64_t, Rational> g;
  for (const auto& [o, m] : support)
    if (o.tau1 >= 0) g[o.tau1 - o.tau0] += m;
  return g;
}

std::map<std::int64_t, Rational> ExactLaw::gap_given_ref() const {
  std::map<std::int64_t, Rational> g;
  Rational total = 0;
  for (const auto& [o, m] : support) {
    if (o.tau0 != n_ref) continue;
    total += m;
    if (o.tau1 >= 0) g[o.tau1 - o.tau0] += m;
  }
  if (total > 0)
    for (auto& [n, m] : g) m /= total;
  return g;
}

std::optional<Rational> ExactLaw::next_symbol_given_gap(std::int64_t gap, int s) const {
  Rational num = 0, den = 0;
  for (const auto& [k, m] : after_first_gap) {
    if (k.first != gap) continue;
    den += m;
    if (k.second == s) num += m;
  }
  if (den == 0) return std::nullopt;
  return Rational(num / den);
}

nlohmann::json ExactLaw::to_json() const {
  nlohmann::json j;
  j["T"] = T;
  j["L"] = L;
  j["min_separation"] = min_separation;
  j["sequences"] = sequences;
  j["total_mass"] = to_string(total());
  nlohmann::json gaps = nlohmann::json::object();
  for (const auto& [n, m] : gap_law()) gaps[std::to_string(n)] = to_string(m);
  j["gap_law"] = gaps;
  std::map<std::int64_t, Rational> tau0;
  for (const auto& [o, m] : support) tau0[o.tau0] += m;
  nlohmann::json t0 = nlohmann::json::object();
  for (const auto& [n, m] : tau0) t0[std::to_string(n)] = to_string(m);
  j["tau0_law"] = t0;
  if (!e_prob.empty()) {
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [n, m] : e_prob) e[std::to_string(n)] = to_string(m);
    j["e_prob"] = e;
  }
  if (!e_witness.empty()) j["e_witness"] = e_witness;
  return j;
}

ExactLaw enumerate_exact(const RationalAlphabet& alphabet, const TruncatedPast& h, const TruncatedFuture& f,
                         const EnumerationConfig& cfg) {
  if (cfg.T < 0) throw ConfigError("enumerate_exact: T must be >= 0");
  if (cfg.min_separation < 1) throw ConfigError("enumerate_exact: min_separation must be >= 1");
  const RationalAlphabet a = alphabet.support();
  const int L = f.lookahead;
  const int len = cfg.T + L;
  const std::size_t base = a.size();
  check_guard(base, len, cfg.guard);

  const mpz_class den_one = a.common_denominator();
  const std::vector<mpz_class> num = a.numerators();
  const std::vector<int>& sym = a.symbols();

  // Prefix partition: one task per assignment of the first `depth` symbols.
  int depth = 0;
  std::size_t tasks = 1;
  while (depth < len && tasks < 64) {
    tasks *= base;
    ++depth;
  }
  std::vector<Accumulator> parts(tasks);
  core::parallel_for(tasks, [&](std::size_t t) {
    std::vector<std::size_t> prefix(static_cast<std::size_t>(depth));
    for (int d = depth; d-- > 0;) {
      prefix[static_cast<std::size_t>(d)] = t % base;
      t /= base;
    }
    const std::size_t task = [&] {
      std::size_t id = 0;
      for (auto p : prefix) id = id * base + p;
      return id;
    }();
    Accumulator& acc = parts[task];
    Odometer odo(base, static_cast<std::size_t>(len), prefix);
    std::vector<int> x(static_cast<std::size_t>(len));
    std::vector<mpz_class> weight(static_cast<std::size_t>(len) + 1);
    weight[0] = 1;
    std::size_t changed = 0;
    while (changed != std::string::npos) {
      const auto& idx = odo.idx();
      for (std::size_t i = changed; i < static_cast<std::size_t>(len); ++i) {
        x[i] = sym[idx[i]];
        weight[i + 1] = weight[i] * num[idx[i]];
      }
      const mpz_class& w = weight[static_cast<std::size_t>(len)];
      ++acc.sequences;
      const auto taus = break_times(x, cfg.T, h, f, cfg.min_separation);
      ExactLaw::Outcome o;
      if (!taus.empty()) o.tau0 = taus[0];
      if (taus.size() >= 2) {
        o.tau1 = taus[1];
        o.segment.assign(x.begin() + taus[0], x.begin() + taus[1]);
        if (taus[1] < len) acc.after[{taus[1] - taus[0], x[static_cast<std::size_t>(taus[1])]}] += w;
      }
      acc.support[o] += w;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        const std::string next = k + 1 < taus.size() ? segment_key(taus[k], taus[k + 1], x) : "none";
        acc.histories[history_key(taus, k, x)][next] += w;
      }
      changed = odo.next();
    }
  });
  Accumulator all;
  for (auto& p : parts) all.merge(std::move(p));

  mpz_class den;
  mpz_pow_ui(den.get_mpz_t(), den_one.get_mpz_t(), static_cast<unsigned long>(len));
  auto q = [&den](const mpz_class& m) {
    Rational r(m, den);
    r.canonicalize();
    return r;
  };

  ExactLaw law;
  law.symbols = sym;
  law.T = cfg.T;
  law.L = L;
  law.min_separation = cfg.min_separation;
  law.sequences = all.sequences;
  for (const auto& [o, m] : all.support) law.support.emplace(o, q(m));
  for (const auto& [k, mm] : all.histories)
    for (const auto& [s, m] : mm) law.histories[k][s] = q(m);
  for (const auto& [k, m] : all.after) law.after_first_gap.emplace(k, q(m));
  for (const auto& [o, m] : law.support)
    if (o.tau0 >= 0 && m > 0) {
      law.n_ref = o.tau0;
      break;
    }

  if (cfg.min_separation == 1 && law.n_ref >= 0) {
    // Pr(E_{0,n}) by stationarity equals Pr(E_{b,b+n}) at b = n_ref. On
    // H_b and F_{b+n}, the indicator of F_b A_{b+1}^c .. A_{b+n-1}^c H_{b+n}
    // must be a function of xi_{b+1}..xi_{b+n}; E is that function.
    const int b = static_cast<int>(law.n_ref);
    const std::vector<Rational>& wts = a.weights();
    auto is_a = [&](const std::vector<int>& x, int j) {
      return h(PastAccess(x.data(), j, h.window)) && f(FutureAccess(x.data() + j, L));
    };
    for (int n = 1; n <= cfg.T - b && law.e_witness.empty(); ++n) {
      const int span = b + n + L;
      check_guard(base, span, cfg.guard);
      std::map<std::vector<int>, std::pair<bool, std::vector<int>>> projection;
      Odometer odo(base, static_cast<std::size_t>(span), {});
      std::vector<int> x(static_cast<std::size_t>(span));
      std::size_t changed = 0;
      while (changed != std::string::npos && law.e_witness.empty()) {
        for (std::size_t i = changed; i < static_cast<std::size_t>(span); ++i) x[i] = sym[odo.idx()[i]];
        changed = odo.next();
        if (!h(PastAccess(x.data(), b, h.window)) || !f(FutureAccess(x.data() + b + n, L))) continue;
        bool v = f(FutureAccess(x.data() + b, L));
        for (int j = b + 1; j < b + n && v; ++j) v = !is_a(x, j);
        v = v && h(PastAccess(x.data(), b + n, h.window));
        std::vector<int> key(x.begin() + b, x.begin() + b + n);
        auto [it, fresh] = projection.try_emplace(key, v, x);
        if (!fresh && it->second.first != v)
          law.e_witness = "E_{0," + std::to_string(n) + "} not determined by the segment: sequences [" +
                          join(it->second.second.data(), it->second.second.size()) + "] and [" +
                          join(x.data(), x.size()) + "]";
      }
      if (!law.e_witness.empty()) break;
      Rational p = 0;
      for (const auto& [key, val] : projection) {
        if (!val.first) continue;
        Rational pk = 1;
        for (int s : key) pk *= wts[static_cast<std::size_t>(std::find(sym.begin(), sym.end(), s) - sym.begin())];
        p += pk;
      }
      law.e_prob[n] = p;
    }
    if (!law.e_witness.empty()) law.e_prob.clear();
  }
  return law;
}

nlohmann::json IidVerdict::to_json() const {
  nlohmann::json j{{"pass", pass}, {"comparisons", comparisons}};
  if (!pass) {
    j["witness"] = {{"history", witness_history},
                    {"segment", witness_segment},
                    {"conditional", to_string(conditional)},
                    {"reference", to_string(reference)}};
  }
  if (flatness_checked) {
    j["flatness"] = {{"pass", flatness_pass}, {"a", to_string(a)}};
    if (!flatness_witness.empty()) j["flatness"]["witness"] = flatness_witness;
  }
  return j;
}

IidVerdict verify_iid_segments_exact(const ExactLaw& law) {
  IidVerdict v;
  if (law.n_ref < 0) {
    v.pass = false;
    v.witness_segment = "no break time in 0..T";
    return v;
  }
  const std::string ref_prefix = "t=" + std::to_string(law.n_ref) + ";";
  std::map<std::string, Rational> ref;
  Rational ref_total = 0;
  for (const auto& [hist, next] : law.histories) {
    if (hist.rfind(ref_prefix, 0) != 0) continue;
    for (const auto& [s, m] : next) {
      ref[s] += m;
      ref_total += m;
    }
  }

  for (const auto& [hist, next] : law.histories) {
    const std::int64_t budget = law.T - history_last_tau(hist);
    Rational total = 0;
    for (const auto& [s, m] : next) total += m;
    auto compare = [&](const std::string& seg, const Rational& mass) {
      const std::int64_t g = segment_gap(seg);
      if (g < 0 || g > budget) return true;
      ++v.comparisons;
      auto r = ref.find(seg);
      const Rational rm = r == ref.end() ? Rational(0) : r->second;
      // mass / total == rm / ref_total
      if (mass * ref_total == rm * total) return true;
      v.pass = false;
      v.witness_history = hist;
      v.witness_segment = seg;
      v.conditional = mass / total;
      v.reference = rm / ref_total;
      return false;
    };
    for (const auto& [seg, mass] : next)
      if (!compare(seg, mass)) return v;
    for (const auto& [seg, rm] : ref)
      if (!next.contains(seg) && !compare(seg, Rational(0))) return v;
  }

  if (!law.e_prob.empty()) {
    v.flatness_checked = true;
    v.flatness_pass = true;
    bool have_a = false;
    const auto gaps = law.gap_given_ref();
    for (const auto& [n, e] : law.e_prob) {
      auto g = gaps.find(n);
      const Rational pmf = g == gaps.end() ? Rational(0) : g->second;
      if (e == 0 && pmf == 0) continue;
      if (e == 0) {
        v.flatness_pass = false;
        v.flatness_witness = "gap " + std::to_string(n) + " has mass " + to_string(pmf) + " but Pr(E_{0,n}) = 0";
        break;
      }
      const Rational ratio = pmf / e;
      if (!have_a) {
        v.a = ratio;
        have_a = true;
      } else if (ratio != v.a) {
        v.flatness_pass = false;
        v.flatness_witness = "ratio at n=" + std::to_string(n) + " is " + to_string(ratio) + ", expected " + to_string(v.a);
        break;
      }
    }
  } else if (!law.e_witness.empty()) {
    v.flatness_checked = true;
    v.flatness_pass = false;
    v.flatness_witness = law.e_witness;
  }
  return v;
}

}  // namespace regenlab::oracle
