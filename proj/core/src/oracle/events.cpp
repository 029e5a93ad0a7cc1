#include "regenlab/oracle/events.hpp"

#include <algorithm>

#include "regenlab/errors.hpp"

namespace regenlab::oracle {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

RationalAlphabet::RationalAlphabet(std::vector<int> symbols, std::vector<Rational> weights)
    : symbols_(std::move(symbols)), weights_(std::move(weights)) {
  if (symbols_.empty()) throw ConfigError("rational alphabet: no symbols");
  if (symbols_.size() != weights_.size()) throw ConfigError("rational alphabet: size mismatch");
  Rational total = 0;
  bool positive = false;
  for (auto& w : weights_) {
    w.canonicalize();
    if (w < 0) throw ConfigError("rational alphabet: negative weight");
    positive = positive || w > 0;
    total += w;
  }
  if (!positive) throw ConfigError("rational alphabet: all weights are zero");
  if (total != 1) throw ConfigError("rational alphabet: weights sum to " + to_string(total) + ", not 1");
  auto sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("rational alphabet: repeated symbol");
}

Rational RationalAlphabet::probability_of(int s) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == s) return weights_[i];
  return 0;
}

RationalAlphabet RationalAlphabet::support() const {
  std::vector<int> s;
  std::vector<Rational> w;
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (weights_[i] > 0) {
      s.push_back(symbols_[i]);
      w.push_back(weights_[i]);
    }
  return RationalAlphabet(std::move(s), std::move(w));
}

mpz_class RationalAlphabet::common_denominator() const {
  mpz_class d = 1;
  for (const auto& w : weights_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), w.get_den_mpz_t());
  return d;
}

std::vector<mpz_class> RationalAlphabet::numerators() const {
  const mpz_class d = common_denominator();
  std::vector<mpz_class> out;
  for (const auto& w : weights_) out.push_back(w.get_num() * (d / w.get_den()));
  return out;
}

RationalAlphabet RationalAlphabet::skip_free_walk(const Rational& p, const Rational& q) {
  return RationalAlphabet({-1, 0, 1}, {q, Rational(1) - p - q, p});
}

RationalAlphabet RationalAlphabet::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("symbols") || !j.contains("weights"))
    throw ConfigError("rational alphabet: need 'symbols' and 'weights'");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "symbols" && it.key() != "weights" && it.key() != "type")
      throw ConfigError("rational alphabet: unknown key '" + it.key() + "'");
  std::vector<int> s;
  std::vector<Rational> w;
  for (const auto& v : j.at("symbols")) {
    if (!v.is_number_integer()) throw ConfigError("rational alphabet: symbols must be integers");
    s.push_back(v.get<int>());
  }
  for (const auto& v : j.at("weights")) {
    if (v.is_string()) {
      Rational q;
      if (q.set_str(v.get<std::string>(), 10) != 0) throw ConfigError("rational alphabet: bad weight '" + v.get<std::string>() + "'");
      w.push_back(q);
    } else if (v.is_number_integer()) {
      w.emplace_back(v.get<long>());
    } else {
      throw ConfigError("rational alphabet: weights must be \"num/den\" strings or integers");
    }
  }
  return RationalAlphabet(std::move(s), std::move(w));
}

nlohmann::json RationalAlphabet::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& q : weights_) w.push_back(to_string(q));
  return {{"symbols", symbols_}, {"weights", w}};
}

int FutureAccess::operator()(int lag) const {
  if (lag < 1 || lag > lookahead_)
    throw ContractError("future event read lag " + std::to_string(lag) + " outside 1.." + std::to_string(lookahead_));
  return values_[lag - 1];
}

std::int64_t PastAccess::first() const noexcept {
  return window_ > 0 ? std::max<std::int64_t>(1, n_ - window_ + 1) : 1;
}

int PastAccess::operator()(std::int64_t index) const {
  if (index > n_)
    throw MeasurabilityError("past event read xi_" + std::to_string(index) + " at base time " + std::to_string(n_));
  if (index < first())
    throw ContractError("past event read xi_" + std::to_string(index) + " outside its window");
  return values_[index - 1];
}

TruncatedPast past_always() {
  return {"always", 0, [](const PastAccess&) { return true; }};
}

TruncatedPast past_strict_record() {
  return {"strict_record", 0, [](const PastAccess& a) {
            // S_n - S_j = xi_{j+1} + ... + xi_n > 0 for all j < n.
            long tail = 0;
            for (std::int64_t j = a.n(); j >= 1; --j) {
              tail += a(j);
              if (tail <= 0) return false;
            }
            return true;
          }};
}

TruncatedPast past_run_of_ones(int k) {
  if (k < 0) throw ConfigError("run of ones: k must be >= 0");
  return {"run_of_ones", k, [k](const PastAccess& a) {
            if (a.n() < k) return false;
            for (std::int64_t i = a.n() - k + 1; i <= a.n(); ++i)
              if (a(i) != 1) return false;
            return true;
          }};
}

TruncatedPast past_reads_future() {
  return {"reads_future", 0, [](const PastAccess& a) { return a(a.n() + 1) > 0; }};
}

TruncatedFuture future_walk(int lookahead, bool strict) {
  if (lookahead < 1) throw ConfigError("future_walk: lookahead must be >= 1");
  return {strict ? "walk_strict" : "walk_weak", lookahead, [strict](const FutureAccess& a) {
            long s = 0;
            for (int j = 1; j <= a.lookahead(); ++j) {
              s += a(j);
              if (strict ? s <= 0 : s < 0) return false;
            }
            return true;
          }};
}

TruncatedFuture future_walk_next_zero(int lookahead) {
  if (lookahead < 2) throw ConfigError("future_walk_next_zero: lookahead must be >= 2");
  auto walk = future_walk(lookahead, false);
  return {"walk_next_zero", lookahead, [walk](const FutureAccess& a) { return a(2) == 0 && walk(a); }};
}

TruncatedFuture future_bins(int lookahead) {
  if (lookahead < 1) throw ConfigError("future_bins: lookahead must be >= 1");
  return {"bins", lookahead, [](const FutureAccess& a) {
            for (int i = 1; i <= a.lookahead(); ++i)
              if (a(i) > i) return false;
            return true;
          }};
}

TruncatedFuture future_always(int lookahead) {
  return {"always", lookahead, [](const FutureAccess&) { return true; }};
}

TruncatedPast past_by_name(const std::string& name, int k) {
  if (name == "always") return past_always();
  if (name == "strict_record") return past_strict_record();
  if (name == "run_of_ones") return past_run_of_ones(k);
  if (name == "reads_future") return past_reads_future();
  throw ConfigError("unknown past event '" + name + "'");
}

TruncatedFuture future_by_name(const std::string& name, int lookahead) {
  if (name == "walk_weak") return future_walk(lookahead, false);
  if (name == "walk_strict") return future_walk(lookahead, true);
  if (name == "walk_next_zero") return future_walk_next_zero(lookahead);
  if (name == "bins") return future_bins(lookahead);
  if (name == "always") return future_always(lookahead);
  throw ConfigError("unknown future event '" + name + "'");
}

}  // namespace regenlab::oracle
