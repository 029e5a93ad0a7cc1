#pragma once

// Skip-free discrete-time contact processes driven from the right endpoint:
// the two-state process (Kuczek regeneration) and the three-state process
// with immunisation (record-event break times).
//
// Descendant sets are subsets of {-1, +1}. Infected sites at time n all share
// the parity of r_n, so the draws xi_{n,z} are only needed at even z = -2j,
// j >= 0, and are generated 64 at a time (bit i of block b is j = 64 b + i).

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/driving_stream.hpp"
#include "regenlab/regen/events.hpp"
#include "regenlab/regen/scanner.hpp"
#include "regenlab/stats/estimators.hpp"

namespace regenlab::contact {

// Joint law of a descendant set over the four subsets of {-1, +1}.
struct DescendantLaw {
  double none = 0.0625;
  double left = 0.1875;
  double right = 0.1875;
  double both = 0.5625;

  void validate() const;
  double p_left() const noexcept { return left + both; }
  double p_right() const noexcept { return right + both; }

  // -1 and +1 present independently, each with probability b.
  static DescendantLaw independent(double b);
  static DescendantLaw from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

inline constexpr std::int64_t kDefaultWidthCap = std::int64_t{1} << 16;

// The per-step driving families {xi_{n,z}} and {I_{n,z}}, z = -2j. Every bit
// is a pure function of (seed, offset + n, j); shift(k) moves the time origin.
class ContactDriving {
 public:
  ContactDriving(std::uint64_t seed, DescendantLaw law, double q = 1.0, std::int64_t offset = 0);
  // Shares the seed and origin of a scalar stream.
  static ContactDriving from_stream(const core::DrivingStream& s, DescendantLaw law, double q = 1.0);

  std::uint64_t left_bits(std::int64_t n, std::uint64_t block) const noexcept;
  std::uint64_t right_bits(std::int64_t n, std::uint64_t block) const noexcept;
  std::uint64_t immune_bits(std::int64_t n, std::uint64_t block) const noexcept;

  ContactDriving shift(std::int64_t k) const;
  std::uint64_t seed() const noexcept { return rng_.seed(); }
  std::int64_t offset() const noexcept { return offset_; }
  const DescendantLaw& law() const noexcept { return law_; }
  double q() const noexcept { return q_; }

 private:
  core::CounterRng rng_;
  DescendantLaw law_;
  double q_;
  std::int64_t offset_;
  std::uint64_t t_left_;
  std::uint64_t t_right_if_left_;
  std::uint64_t t_right_if_not_;
  std::uint64_t t_immune_;
  bool independent_;
};

// ---------------------------------------------------------------- two-state

// Infected set stored relative to its right endpoint: bit j of `occupied`
// is site r - 2j. Empty `occupied` means extinct.
struct LatticeConfig2 {
  std::int64_t r = 0;
  std::vector<std::uint64_t> occupied;
  std::int64_t truncations = 0;  // steps in which the width cap dropped sites

  bool extinct() const noexcept { return occupied.empty(); }
  std::size_t count() const noexcept;
  std::int64_t leftmost() const;
  bool contains(std::int64_t x) const noexcept;
  std::vector<std::int64_t> sites() const;  // ascending

  static LatticeConfig2 single_site(std::int64_t x = 0);
  // Sites must share one parity.
  static LatticeConfig2 from_sites(const std::vector<std::int64_t>& sites);
};

// X_n -> X_{n+1} using the draws of step n + 1. Sites further than
// width_cap to the left of the new right endpoint are dropped and counted.
void step2_inplace(LatticeConfig2& x, const ContactDriving& d, std::int64_t n,
                   std::int64_t width_cap = kDefaultWidthCap);
LatticeConfig2 step2(const LatticeConfig2& x, const ContactDriving& d, std::int64_t n,
                     std::int64_t width_cap = kDefaultWidthCap);

struct Probe {
  regen::FutureVerdict verdict;
  // r^{(n)}_{n+i} for i = 0.. while alive (only when requested).
  std::vector<std::int64_t> path;
};

// Runs X^{(n)} from {0} for up to T steps: Fails at the extinction lag,
// Undecided(T) if still alive.
Probe survival_probe2(const ContactDriving& d, std::int64_t n, std::int64_t T, bool record_path = false);
regen::FutureVerdict survival_probe(const ContactDriving& d, std::int64_t n, std::int64_t T);

// F_n of the two-state process as a future event over a scalar stream's
// seed and origin.
regen::FutureEventSpec survival_event2(DescendantLaw law);

struct SurvivalEstimate {
  std::vector<std::int64_t> horizons;
  std::vector<double> fraction;  // fraction alive at each horizon
  std::int64_t samples = 0;
  double p_hat = 0.0;             // fraction at the largest horizon
  double std_error = 0.0;
  double extrapolated = 0.0;      // Aitken limit of the nested fractions
  bool shrinking = false;         // successive changes shrink geometrically
  std::vector<std::int64_t> extinction_times;
  std::optional<stats::TailFit> tail;  // geometric rate of finite extinction times

  bool supercritical() const noexcept;
  nlohmann::json to_json() const;
};

// Independent single-site probes on disjoint draws (base n_i = i (T + 1)).
SurvivalEstimate estimate_survival2(const ContactDriving& d, std::vector<std::int64_t> horizons,
                                    std::int64_t samples);

struct ContactScan {
  regen::ScanResult scan;               // cycles carry the relative right-endpoint trace
  std::vector<double> increments;       // r^{(tau_k)}_{tau_{k+1}}
  std::vector<std::int64_t> rbar;       // three-state: the Z_- process right endpoint
  std::int64_t probes = 0;
  std::int64_t overlong_gaps = 0;       // gaps longer than the probe horizon
  std::int64_t window_truncations = 0;  // three-state: steps that cut the Z_- window
};

// Break times A_n = F_n, F truncated at T, over [0, N]. A failed probe at n
// that dies at n + d rules out every n' in (n, n + d), so scanning resumes
// at n + d.
ContactScan kuczek_scan(const ContactDriving& d, std::int64_t N, std::int64_t T);

struct SpeedClt {
  stats::RateEstimate speed;
  double sigma2 = 0.0;  // diffusion constant, Var(reward - mu gap) / E gap
  std::int64_t window = 0;
  double var_n = 0.0;   // variance of (r_{s+n} - r_s - n mu) / sqrt(n)
  double var_2n = 0.0;
  double variance_change = 0.0;  // |var_2n - var_n| / var_n

  bool clt_stable(double tolerance = 0.2) const noexcept { return variance_change < tolerance; }
  nlohmann::json to_json() const;
};

// Renewal-reward speed and a CLT scaling diagnostic over the concatenated
// cycle traces. window = 0 picks n = max(8, length / 1024).
SpeedClt speed_and_clt(const std::vector<regen::Cycle>& cycles, std::int64_t window = 0);

// -------------------------------------------------------------- three-state

// States in {-1, 0, 1} over the window [lo, lo + size); sites left of the
// window are 0 and sites right of it are -1.
struct LatticeConfig3 {
  std::int64_t lo = 0;
  std::vector<std::int8_t> states;
  std::int64_t r = 0;  // rightmost infected site (valid unless extinct)
  bool extinct = false;
  std::int64_t truncations = 0;

  std::int8_t at(std::int64_t x) const noexcept;
  std::int64_t hi() const noexcept { return lo + static_cast<std::int64_t>(states.size()) - 1; }
  std::int64_t leftmost() const;  // leftmost infected site

  // 1 at 0, 0 to the left, -1 to the right: X^{(n)}.
  static LatticeConfig3 single_site();
  // The Z_- process: 1 at even x in [-window, 0], 0 at odd x < 0, -1 for x > 0.
  static LatticeConfig3 zminus(std::int64_t window);
  // Explicit window; r is recomputed.
  static LatticeConfig3 from_states(std::int64_t lo, std::vector<std::int8_t> states);
};

// Infected sites only at x with n + x even.
bool parity_holds(const LatticeConfig3& x, std::int64_t n);
// No -1 at or left of r; every site left of the leftmost 1 is 0.
bool left_profile_holds(const LatticeConfig3& x);

// One step using the draws of step n + 1. window > 0 cuts the window to
// [r - window, ...] after the step (counted in truncations).
void step3_inplace(LatticeConfig3& x, const ContactDriving& d, std::int64_t n, std::int64_t window = 0);
LatticeConfig3 step3(const LatticeConfig3& x, const ContactDriving& d, std::int64_t n, std::int64_t window = 0);

Probe survival_probe3(const ContactDriving& d, std::int64_t n, std::int64_t T, bool record_path = false);

// Break times A_n = H_n ∩ F_n: H_n says the Z_- process is at a record of
// its right endpoint, F_n that X^{(n)} survives T steps. window defaults to
// max(2T + 2, 4096).
ContactScan record_scan3(const ContactDriving& d, std::int64_t N, std::int64_t T, std::int64_t window = 0);

SurvivalEstimate estimate_survival3(const ContactDriving& d, std::vector<std::int64_t> horizons,
                                    std::int64_t samples);

// --------------------------------------------------------- coupling replays

struct ReplayReport {
  std::string identity;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::string first_violation;

  bool pass() const noexcept { return checks > 0 && violations == 0; }
  nlohmann::json to_json() const;
};

// Two-state cocycle identity: r^{(n)}_{n+m+n'} = r^{(n)}_{n+m} + r^{(n+m)}_{n+m+n'}
// on random triples with X^{(n)} alive at n + m and X^{(n+m)} alive at
// n + m + n'.
ReplayReport replay_cocycle_two_state(const ContactDriving& d, std::int64_t triples, std::int64_t T,
                                   std::uint64_t seed);
// Two-state coupling: a random X-hat containing 0 and nothing to its right
// has the right endpoint of X^{(n)} while X^{(n)} is alive.
ReplayReport replay_coupling_two_state(const ContactDriving& d, std::int64_t trials, std::int64_t T, std::uint64_t seed);
// Two-state cycle decomposition: r_{tau_k + n'} from X_0 = {0} against the
// sum of cycle increments, on runs where X_0 = {0} survives to tau_0.
ReplayReport replay_cycle_sum_two_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                   std::uint64_t seed);

// Three-state coupling with random left configurations.
ReplayReport replay_coupling_three_state(const ContactDriving& d, std::int64_t trials, std::int64_t T,
                                         std::uint64_t seed);
// Three-state cocycle identity at records of r^{(n)}.
ReplayReport replay_cocycle_three_state(const ContactDriving& d, std::int64_t triples, std::int64_t T,
                                     std::uint64_t seed);
// At H_n times the Z_- endpoint moves as r^{(n)}. The cycle sum holds for
// X-hat = X^{(0)} and X-hat = the Z_- process.
ReplayReport replay_record_shift_three_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                    std::int64_t T, std::uint64_t seed);
ReplayReport replay_cycle_sum_three_state(const ContactDriving& d, const ContactScan& scan, std::int64_t checks,
                                     std::uint64_t seed);

}  // namespace regenlab::contact
