#include "regenlab/oracle/conditions.hpp"

#include <cmath>
#include <map>

#include "regenlab/errors.hpp"
#include "regenlab/oracle/exact.hpp"

namespace regenlab::oracle {

nlohmann::json ConditionWitness::to_json() const {
  return {{"condition", condition}, {"n", n}, {"m", m},
          {"first", first},         {"first_value", first_value},
          {"second", second},       {"second_value", second_value}};
}

nlohmann::json ConditionVerdict::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : witnesses) w.push_back(x.to_json());
  return {{"pass", pass}, {"failing_m", failing_m}, {"witnesses", w}};
}

namespace {

// Calls visit(x) for every sequence of length len over the symbols.
template <class Visit>
void for_each_sequence(const std::vector<int>& sym, int len, Visit&& visit) {
  if (std::pow(static_cast<double>(sym.size()), len) > kEnumerationGuard)
    throw SizeError("condition check: enumeration exceeds the guard");
  std::vector<std::size_t> idx(static_cast<std::size_t>(len), 0);
  std::vector<int> x(static_cast<std::size_t>(len), sym[0]);
  while (true) {
    visit(x);
    std::size_t i = idx.size();
    while (i > 0) {
      --i;
      if (++idx[i] < sym.size()) {
        x[i] = sym[idx[i]];
        break;
      }
      idx[i] = 0;
      x[i] = sym[0];
      if (i == 0) return;
    }
    if (idx.empty()) return;
  }
}

// Projection of a partially observed indicator onto a key; the first
// disagreement becomes a witness.
class Projection {
 public:
  bool record(const std::vector<int>& key, bool value, const std::vector<int>& seq, std::int64_t n,
              ConditionWitness& out) {
    auto [it, fresh] = seen_.try_emplace(key, Entry{value, seq, n});
    if (fresh || it->second.value == value) return true;
    out.n = n;
    out.first = it->second.seq;
    out.first_value = it->second.value;
    out.second = seq;
    out.second_value = value;
    return false;
  }

 private:
  struct Entry {
    bool value;
    std::vector<int> seq;
    std::int64_t n;
  };
  std::map<std::vector<int>, Entry> seen_;
};

}  // namespace

ConditionVerdict check_monotonicity(const RationalAlphabet& alphabet, const TruncatedFuture& f, int max_m,
                                   int min_m) {
  if (min_m < 1 || max_m < min_m) throw ConfigError("monotonicity check: need 1 <= min_m <= max_m");
  const auto sym = alphabet.support().symbols();
  const int L = f.lookahead;
  ConditionVerdict verdict;
  for (int m = min_m; m <= max_m; ++m) {
    Projection proj;
    bool ok = true;
    ConditionWitness w;
    for_each_sequence(sym, m + L, [&](const std::vector<int>& x) {
      if (!ok || !f(FutureAccess(x.data() + m, L))) return;
      const bool v = f(FutureAccess(x.data(), L));
      ok = proj.record(std::vector<int>(x.begin(), x.begin() + m), v, x, 0, w);
    });
    if (!ok) {
      verdict.pass = false;
      verdict.failing_m.push_back(m);
      w.condition = "monotonicity";
      w.m = m;
      verdict.witnesses.push_back(std::move(w));
    }
  }
  return verdict;
}

ConditionVerdict check_restriction_conditions(const RationalAlphabet& alphabet, const TruncatedPast& h,
                                              const TruncatedFuture& f, int max_m, int n_max, int min_m) {
  if (min_m < 1 || max_m < min_m) throw ConfigError("restriction check: need 1 <= min_m <= max_m");
  if (n_max < 0) throw ConfigError("restriction check: n_max must be >= 0");
  const auto sym = alphabet.support().symbols();
  const int L = f.lookahead;
  ConditionVerdict verdict;
  for (int m = min_m; m <= max_m; ++m) {
    Projection proj_future, proj_past;
    bool ok1 = true, ok43 = true;
    ConditionWitness w1, w43;
    for (int n = 0; n <= n_max; ++n) {
      for_each_sequence(sym, n + m + L, [&](const std::vector<int>& x) {
        const int* p = x.data();
        const bool hn = h(PastAccess(p, n, h.window));
        const bool fn = f(FutureAccess(p + n, L));
        const bool hnm = h(PastAccess(p, n + m, h.window));
        const bool fnm = f(FutureAccess(p + n + m, L));
        const std::vector<int> key(x.begin() + n, x.begin() + n + m);
        if (ok1 && hn && hnm && fnm) ok1 = proj_future.record(key, fn, x, n, w1);
        if (ok43 && hn && fn) ok43 = proj_past.record(key, hnm, x, n, w43);
      });
    }
    if (!ok1 || !ok43) {
      verdict.pass = false;
      verdict.failing_m.push_back(m);
    }
    if (!ok1) {
      w1.condition = "future_restriction";
      w1.m = m;
      verdict.witnesses.push_back(std::move(w1));
    }
    if (!ok43) {
      w43.condition = "past_restriction";
      w43.m = m;
      verdict.witnesses.push_back(std::move(w43));
    }
  }
  return verdict;
}

}  // namespace regenlab::oracle
