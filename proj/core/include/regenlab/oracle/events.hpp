#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace regenlab::oracle {

using Rational = mpq_class;

// Integer-valued finite law with exact rational weights.
class RationalAlphabet {
 public:
  RationalAlphabet(std::vector<int> symbols, std::vector<Rational> weights);

  const std::vector<int>& symbols() const noexcept { return symbols_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  Rational probability_of(int s) const;

  // Symbols with positive weight; the enumeration runs over these only.
  RationalAlphabet support() const;
  // Weights written as numerators over a common denominator.
  mpz_class common_denominator() const;
  std::vector<mpz_class> numerators() const;

  // P(+1) = p, P(-1) = q, P(0) = 1 - p - q.
  static RationalAlphabet skip_free_walk(const Rational& p, const Rational& q);
  static RationalAlphabet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::vector<int> symbols_;
  std::vector<Rational> weights_;
};

std::string to_string(const Rational& q);  // "num/den"

// xi_{n+1}..xi_{n+L} as seen by a truncated future event; lags outside
// 1..L are contract violations.
class FutureAccess {
 public:
  FutureAccess(const int* values, int lookahead) : values_(values), lookahead_(lookahead) {}
  int operator()(int lag) const;
  int lookahead() const noexcept { return lookahead_; }

 private:
  const int* values_;
  int lookahead_;
};

// xi_1..xi_n as seen by a past event at base time n. Reading beyond n raises
// MeasurabilityError; reading before a declared window raises ContractError.
class PastAccess {
 public:
  PastAccess(const int* values, std::int64_t n, int window) : values_(values), n_(n), window_(window) {}
  int operator()(std::int64_t index) const;
  std::int64_t n() const noexcept { return n_; }
  // First index readable: max(1, n - window + 1), or 1 for unbounded windows.
  std::int64_t first() const noexcept;

 private:
  const int* values_;
  std::int64_t n_;
  int window_;
};

struct TruncatedFuture {
  std::string name;
  int lookahead = 1;
  std::function<bool(const FutureAccess&)> predicate;

  bool operator()(const FutureAccess& a) const { return predicate(a); }
};

struct TruncatedPast {
  std::string name;
  int window = 0;  // 0: the whole history xi_1..xi_n
  std::function<bool(const PastAccess&)> predicate;

  bool operator()(const PastAccess& a) const { return predicate(a); }
  bool trivial() const noexcept { return name == "always"; }
};

// Event library over integer alphabets.
TruncatedPast past_always();
// Strict ladder record: S_n > S_j for all 0 <= j < n.
TruncatedPast past_strict_record();
// xi_{n-k+1} = ... = xi_n = 1 (false for n < k).
TruncatedPast past_run_of_ones(int k);
// Deliberately reads xi_{n+1}; used to exercise the measurability guard.
TruncatedPast past_reads_future();

// sum_{i<=j} xi_{n+i} >= 0 (weak) or > 0 (strict) for j = 1..L.
TruncatedFuture future_walk(int lookahead, bool strict);
// future_walk(weak) and xi_{n+2} = 0.
TruncatedFuture future_walk_next_zero(int lookahead);
// xi_{n+i} <= i for i = 1..L.
TruncatedFuture future_bins(int lookahead);
TruncatedFuture future_always(int lookahead = 1);

TruncatedPast past_by_name(const std::string& name, int k = 0);
TruncatedFuture future_by_name(const std::string& name, int lookahead);

}  // namespace regenlab::oracle
