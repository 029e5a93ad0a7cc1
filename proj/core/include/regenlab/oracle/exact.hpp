#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/oracle/events.hpp"

namespace regenlab::oracle {

inline constexpr double kEnumerationGuard = 1e8;

struct EnumerationConfig {
  int T = 6;  // break times are sought in 0..T
  int min_separation = 1;
  int threads = 0;  // 0: REGENLAB_THREADS or hardware concurrency
  double guard = kEnumerationGuard;
};

// Joint law of (tau_0, tau_1, first segment) plus the conditional structure
// needed for the i.i.d. check. A tau of -1 means "no break time in 0..T".
struct ExactLaw {
  struct Outcome {
    std::int64_t tau0 = -1;
    std::int64_t tau1 = -1;
    std::vector<int> segment;
    auto operator<=>(const Outcome&) const = default;
  };

  std::vector<int> symbols;  // support of the alphabet
  int T = 0;
  int L = 0;
  int min_separation = 1;
  std::map<Outcome, Rational> support;
  // History key "t=<taus>;x=<xi_1..xi_tau_k>" -> next-segment key -> mass.
  // Segment keys are "g=<gap>;x=<symbols>" or "none" when no further break
  // occurs in 0..T.
  std::map<std::string, std::map<std::string, Rational>> histories;
  // (tau_1 - tau_0, xi_{tau_1 + 1}) -> mass.
  std::map<std::pair<std::int64_t, int>, Rational> after_first_gap;
  // Smallest tau_0 with positive mass; the reference for identical
  // distribution is the first segment given tau_0 = n_ref.
  std::int64_t n_ref = -1;
  // Pr(E_{0,n}) built by projection at base n_ref (E is stationary in its
  // base); empty when the projection is not well defined (then e_witness
  // says why) or under thinning.
  std::map<std::int64_t, Rational> e_prob;
  std::string e_witness;
  std::uint64_t sequences = 0;

  Rational total() const;
  // P(tau_1 - tau_0 = n).
  std::map<std::int64_t, Rational> gap_law() const;
  // P(tau_1 - tau_0 = n | tau_0 = n_ref).
  std::map<std::int64_t, Rational> gap_given_ref() const;
  // P(xi_{tau_1+1} = s | tau_1 - tau_0 = gap); nullopt if the gap has no mass.
  std::optional<Rational> next_symbol_given_gap(std::int64_t gap, int s) const;
  nlohmann::json to_json() const;
};

// Exhaustive summation over xi_1..xi_{T+L}. Throws SizeError when
// |support|^(T+L) exceeds the guard.
ExactLaw enumerate_exact(const RationalAlphabet& alphabet, const TruncatedPast& h, const TruncatedFuture& f,
                         const EnumerationConfig& cfg);

struct IidVerdict {
  bool pass = true;
  std::int64_t comparisons = 0;
  std::string witness_history;
  std::string witness_segment;
  Rational conditional;
  Rational reference;
  // Flatness of Pr(gap = n) / Pr(E_{0,n}).
  bool flatness_checked = false;
  bool flatness_pass = false;
  Rational a;
  std::string flatness_witness;

  nlohmann::json to_json() const;
};

// Conditional law of the next segment given every positive-probability
// history equals the law of the first segment given tau_0 = 0, compared on
// segments short enough to be observed in both. Also checks that the gap law is flat against
// Pr(E_{0,n}) when that is available.
IidVerdict verify_iid_segments_exact(const ExactLaw& law);

}  // namespace regenlab::oracle
