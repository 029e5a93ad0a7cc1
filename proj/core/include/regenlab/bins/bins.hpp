#pragma once

// Infinite-bin models: the basic discrete model, its extension to two
// mutually prime ranks, and the continuous-space random-links model.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/driving_stream.hpp"
#include "regenlab/regen/events.hpp"
#include "regenlab/regen/scanner.hpp"

namespace regenlab::bins {

// ------------------------------------------------------------------ bins

// Finite configuration (x_{-l}, ..., x_0), stored leftmost first so the top
// bin is counts.back().
struct BinState {
  std::vector<std::int64_t> counts{1};
  std::int64_t total = 1;

  std::int64_t extent() const noexcept { return static_cast<std::int64_t>(counts.size()) - 1; }
  std::int64_t top() const noexcept { return counts.back(); }
  // x_{-j}; 0 beyond the extent.
  std::int64_t at(std::int64_t j) const noexcept;
  // (x_{-k}, ..., x_0), padded with 0 on the left.
  std::vector<std::int64_t> display(std::int64_t k) const;
  bool valid() const noexcept;

  static BinState from_counts(std::vector<std::int64_t> counts);
};

// One step of the map f with active particle number xi >= 1.
void step_bins_inplace(BinState& x, std::int64_t xi);
BinState step_bins(const BinState& x, std::int64_t xi);

// Process adapter over a driving stream of positive integers. The
// observable is the top bin count X_{0,n}.
class BinsAdapter final : public regen::ProcessAdapter {
 public:
  explicit BinsAdapter(BinState initial = {}) : initial_(std::move(initial)), state_(initial_) {}
  void reset(const core::DrivingStream& stream) override;
  void advance() override;
  std::int64_t time() const override { return n_; }
  double observable() const override { return static_cast<double>(state_.top()); }
  const BinState& state() const noexcept { return state_; }

 private:
  BinState initial_;
  BinState state_;
  const core::DrivingStream* stream_ = nullptr;
  std::int64_t n_ = 0;
};

// F_n = {xi_{n+l} <= base + l - 1 for all l >= 1}; base 1 is the basic model.
regen::FutureEventSpec ladder_future(std::int64_t base);
// H_n = {xi_{n-k} = ... = xi_n = 1}. The run has k + 1 ones so that
// X_n(-k) = (1, ..., 1).
regen::PastEventSpec ones_run(std::int64_t k);

struct BinsScan {
  regen::ScanResult scan;
  std::int64_t depth = 0;
  // Per cycle, X_{tau+i}(-depth) for i = 1..gap, flattened row by row.
  std::vector<std::vector<std::int64_t>> display;
  std::int64_t h_count = 0;          // indices with H_n
  std::int64_t h_violations = 0;     // H_n without the promised X_n(-depth)
  std::int64_t min_gap = 0;
};

struct BasicConfig {
  std::int64_t depth = 0;
  regen::BreakConfig breaks{64, 1, 100000};
  BinState initial{};
};

// A_n = H_n ∩ F_n with the ones-run past event and the ladder future.
BinsScan scan_bins_basic(const core::DrivingStream& stream, const BasicConfig& cfg);

// Occurrence fraction of the truncated ladder event over n = 0..samples-1.
double ladder_occurrence(const core::DrivingStream& stream, std::int64_t base, std::int64_t horizon,
                         std::int64_t samples);
// prod_{i=1}^{horizon} P(xi <= base + i - 1) under the stream law.
double ladder_probability(const core::Law& law, std::int64_t base, std::int64_t horizon);

// Word (j_1..j_{m-1}) over {i1, i2} such that the block i2, j_1..j_{m-1}, i2
// leaves a top bin >= i1 from every starting configuration.
struct ChraWord {
  std::int64_t i1 = 0;
  std::int64_t i2 = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> word;   // j_1..j_{m-1}
  std::vector<std::int64_t> block;  // xi_{n-m}..xi_n
  std::int64_t profiles_checked = 0;

  std::int64_t j1() const noexcept { return word.empty() ? i2 : word.front(); }
  nlohmann::json to_json() const;
};

// Breadth-first search over words of length <= max_length, shortest and
// lexicographically smallest first. Every starting configuration is covered
// by its top profile up to depth i2, which is all the block can see.
ChraWord find_chra_word(std::int64_t i1, std::int64_t i2, std::int64_t max_length = 20);

// Top bin count after the block, from an explicit configuration.
std::int64_t replay_block(BinState x, const std::vector<std::int64_t>& block);

struct PrimeConfig {
  std::int64_t i1 = 2;
  std::int64_t i2 = 3;
  std::int64_t depth = 0;
  std::int64_t max_word_length = 20;
  regen::BreakConfig breaks{64, 1, 100000};
  BinState initial{};
};

struct PrimeScan {
  BinsScan bins;
  ChraWord word;
  std::int64_t r = 0;              // i1 (depth + 1)
  std::int64_t exclusion = 0;      // r + i2 - i1
  bool min_gap_ok = false;         // every gap exceeds the exclusion
};

// H_n = B_{n-r} ∩ D_n, F_n = {xi_{n+l} <= i1 + l - 1}.
regen::PastEventSpec prime_past_event(const ChraWord& w, std::int64_t r);
PrimeScan scan_bins_prime(const core::DrivingStream& stream, const PrimeConfig& cfg);

// Time marginal of X_n(-depth) over n in (from, from + count]. Each vector
// is encoded as sum_j x_{-j} 1024^j, so equal codes mean equal vectors
// across runs; entries >= 1024 or depth > 4 raise DomainError.
double encode_display(const std::vector<std::int64_t>& v);
std::vector<double> display_marginal(const core::DrivingStream& stream, const BinState& initial, std::int64_t depth, std::int64_t from, std::int64_t count);

// ------------------------------------------------------------------ links

// Positions sorted ascending with the rightmost at 0, plus creation ids.
struct LinkState {
  std::vector<double> positions{0.0};
  std::vector<std::int64_t> ids{0};

  std::size_t size() const noexcept { return positions.size(); }
  // Position of rank j (0 = rightmost).
  double rank_position(std::size_t j) const { return positions[positions.size() - 1 - j]; }
  std::int64_t rank_id(std::size_t j) const { return ids[ids.size() - 1 - j]; }
  bool valid() const noexcept;
};

struct StepOutcome {
  double h = 0.0;
  std::int64_t parent_rank = -1;  // -1 when no particle was active
  std::int64_t parent_id = -1;
  std::int64_t nu = -1;           // rightmost active rank, -1 if none
};

// One step with explicit lengths and activity bits indexed by rank.
StepOutcome step_links(LinkState& x, const std::vector<double>& lengths, const std::vector<bool>& active,
                       std::int64_t new_id);

// Per-step driving: activity bits q_{n,-j} ~ Bernoulli(p) and lengths
// l_{n,-j} ~ Exponential(mean a), indexed by rank j. Lengths are generated
// through a 64-ary tree of block maxima, so the largest proposal is found
// without drawing every length; each length is still a pure function of
// (seed, n, j) and the family is i.i.d. exponential.
class LinkDriving {
 public:
  static constexpr int kLevels = 4;  // up to 64^4 ranks

  LinkDriving(std::uint64_t seed, double p, double mean_length = 1.0);

  bool active(std::int64_t n, std::int64_t j) const noexcept;
  std::uint64_t active_word(std::int64_t n, std::int64_t block) const noexcept;
  double length(std::int64_t n, std::int64_t j) const;
  // nu_n over ranks 0..size-1; -1 when none is active.
  std::int64_t nu(std::int64_t n, std::int64_t size) const noexcept;
  // Some j in [from, size) with l_{n,-j} - offset(j) > threshold, found by
  // branch and bound over the max tree; -1 if none. offset must be
  // nondecreasing in j.
  std::int64_t exceeds(std::int64_t n, std::int64_t from, std::int64_t size, double threshold,
                       const std::function<double(std::int64_t)>& offset) const;
  // One model step at time n -> n + 1 using the draws of step n + 1.
  StepOutcome step(LinkState& x, std::int64_t n, std::int64_t new_id) const;

  double p() const noexcept { return p_; }
  double mean_length() const noexcept { return mean_; }
  std::uint64_t seed() const noexcept { return rng_.seed(); }

 private:
  // Maximum of the unit-mean lengths under child `child` of a node whose
  // maximum is `parent_max`.
  double child_max(std::int64_t n, int level, std::int64_t node, std::int64_t child, double parent_max) const;
  double root_max(std::int64_t n) const;
  // Calls visit(rank, unit_length) for leaves in [from, size) whose subtree
  // passes prune(level, first_rank, unit_max) == false.
  template <class Prune, class Visit>
  void descend(std::int64_t n, int level, std::int64_t node, double max_unit, std::int64_t from, std::int64_t size,
               const Prune& prune, Visit& visit) const;

  core::CounterRng rng_;
  double p_;
  double mean_;
  std::uint64_t threshold_;
};

struct LinksConfig {
  double p = 0.5;
  double mean_length = 1.0;
  double epsilon = 0.5;
  std::int64_t blocks = 64;       // K backward blocks kept in H_n
  std::int64_t horizon = 64;      // truncation of F^(1) and F^(2)
  std::int64_t steps = 100000;
  std::int64_t depth = 1;         // trace is the last depth + 1 coordinates
  std::int64_t calibration_steps = 200000;
};

// b = mean gap and b0 = mean stationary age of the F^(1) renewal sequence,
// both from a calibration run, and the offsets
// c_j = r a (1 - eps) for (1 + eps)(b0 + r b) < j <= (1 + eps)(b0 + (r + 1) b).
struct LinkConstants {
  double a = 1.0;
  double epsilon = 0.5;
  double b = 0.0;
  double b0 = 0.0;
  double b_exact = 0.0;  // 1 / P(F^(1)) at the configured horizon
  std::int64_t calibration_gaps = 0;

  double c(std::int64_t j) const noexcept;
  nlohmann::json to_json() const;
};

// prod_{j=1}^{horizon} (1 - q^j), q = 1 - p: the probability of truncated F^(1).
double f1_probability(double p, std::int64_t horizon);
// Truncated F^(1)_n = {nu_{n+j} <= j - 1, j = 1..horizon}: with ranks
// counted from 0, the rightmost active particle at step n + j is one of the
// j particles created since n.
bool f1_holds(const LinkDriving& d, std::int64_t n, std::int64_t horizon);
// Calibration uses the nu sequence of an independent driving with the same
// p, seeded from `seed`.
LinkConstants calibrate_links(const LinksConfig& cfg, std::uint64_t seed);

struct LinksScan {
  regen::ScanResult scan;
  LinkConstants constants;
  std::int64_t f1_count = 0;
  std::int64_t h_count = 0;
  // Every link after tau_0 is checked against the latest break time.
  std::int64_t attachment_checks = 0;
  std::int64_t attachment_violations = 0;  // links to particles numbered < tau
  std::int64_t first_violation_time = -1;
  // Per cycle, the last depth + 1 coordinates at tau + i, flattened.
  std::vector<std::vector<double>> traces;
  // (x_{-depth}, ..., x_0) at each break time.
  std::vector<std::vector<double>> at_breaks;

  nlohmann::json summary() const;
};

LinksScan scan_links(const LinkDriving& d, const LinksConfig& cfg);

// Rough size of P(A_n). The factors of F^(2) use disjoint draws, so
// P(F^(2)) is the product of the per-step factor probabilities, each
// estimated from `samples` draws with `size` particles present. H_n asks K
// i.i.d. blocks to pass, so log10 P(H) is K log10 of the block pass rate
// measured along a simulated path.
struct LinksBudget {
  std::vector<double> f2_factors;
  double log10_f2 = 0.0;
  double block_pass = 0.0;
  std::int64_t blocks_seen = 0;
  double log10_h = 0.0;
  double log10_f1 = 0.0;

  double log10_a() const noexcept { return log10_f1 + log10_h + log10_f2; }
  nlohmann::json to_json() const;
};

LinksBudget links_budget(const LinksConfig& cfg, std::uint64_t seed, std::int64_t samples, std::int64_t size);

}  // namespace regenlab::bins
