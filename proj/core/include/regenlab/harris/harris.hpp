#pragma once

// Harris chains with an explicit minorization on a small set V and the
// Athreya-Ney coin-flip split for m = 1.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/driving_stream.hpp"
#include "regenlab/regen/events.hpp"
#include "regenlab/regen/scanner.hpp"

namespace regenlab::harris {

enum class ChainKind : std::uint8_t {
  // X' = X/2 + U on [0,2]; V = [0,1], p = 1/2, phi = uniform[1/2,1].
  kSplit,
  // W' = max(0, W + S - A), S ~ Exp(mean service), A ~ Exp(mean arrival);
  // V = {0}, p = 1, phi = law of max(0, S - A).
  kLindley,
};

std::string to_string(ChainKind k);
ChainKind chain_kind_from_string(const std::string& s);

struct ChainSpec {
  ChainKind kind = ChainKind::kSplit;
  double service_mean = 0.5;
  double arrival_mean = 1.0;

  double p() const noexcept { return kind == ChainKind::kSplit ? 0.5 : 1.0; }
  bool in_state_space(double x) const noexcept;
  bool in_small_set(double x) const noexcept;
  void validate() const;
  nlohmann::json to_json() const;

  static ChainSpec split() { return {}; }
  static ChainSpec lindley(double service_mean = 0.5, double arrival_mean = 1.0);
};

// Densities of the split chain. kernel_density(x, y) is the density of
// P(x, .) at y, phi_density is uniform on [1/2, 1], and residual_density(x, y)
// is Q(x, .) for x in V: 2 on [x/2, 1/2] and on [1, x/2 + 1].
double kernel_density(double x, double y);
double phi_density(double y);
double residual_density(double x, double y);

// Draws of the step into time n live at counter index n. Lanes separate
// independent replicas.
struct DrawSource {
  core::CounterRng rng;
  std::uint32_t lane = 0;
};

bool coin(const ChainSpec& spec, const DrawSource& d, std::int64_t n);

struct SplitStep {
  double x = 0.0;
  bool regenerated = false;
};

// X_n from X_{n-1} = x without splitting.
double step_direct(const ChainSpec& spec, const DrawSource& d, std::int64_t n, double x);
// X_n from X_{n-1} = x through the split: on V, phi when alpha_n = 1 and Q
// otherwise. The one-step law equals step_direct's.
SplitStep step_split(const ChainSpec& spec, const DrawSource& d, std::int64_t n, double x);
// X_{n+1} from X_n = x using the stream's counter draws at index n + 1.
SplitStep step_split(const ChainSpec& spec, double x, const core::DrivingStream& stream, std::int64_t n);

class HarrisAdapter final : public regen::ProcessAdapter {
 public:
  HarrisAdapter(ChainSpec spec, double x0);
  void reset(const core::DrivingStream& stream) override;
  void advance() override;
  std::int64_t time() const override { return n_; }
  double observable() const override { return x_; }

 private:
  ChainSpec spec_;
  double x0_;
  double x_;
  const core::DrivingStream* stream_ = nullptr;
  std::int64_t n_ = 0;
};

// H_n = {X_n in V} and F_n = {alpha_{n+1} = 1}; T = n + 1 for each break n.
regen::PastEventSpec small_set_event(const ChainSpec& spec);
regen::FutureEventSpec coin_event(const ChainSpec& spec);

// Success times T_0 < T_1 < ... in [1, N] and cycles
// (T_{i+1} - T_i; X_{T_i}, ..., X_{T_{i+1} - 1}) with tau = T.
struct HarrisScan {
  std::vector<std::int64_t> success_times;
  std::vector<regen::Cycle> cycles;
  std::int64_t visits = 0;  // n < N with X_n in V
  std::string diagnostic;

  std::vector<double> gaps() const;
  nlohmann::json summary() const;
};

HarrisScan regeneration_scan(const ChainSpec& spec, const core::DrivingStream& stream, std::int64_t N, double x0);
// The same success times through regen::scan_break_times.
std::vector<std::int64_t> generic_success_times(const ChainSpec& spec, const core::DrivingStream& stream,
                                                std::int64_t N, double x0);

// Largest |kernel - p phi - (1-p) Q| over x, y on a grid of `points` points
// per axis, and the smallest value of kernel - p phi on V x [1/2, 1].
struct DecompositionCheck {
  double max_error = 0.0;
  double min_slack = 0.0;
  double min_residual = 0.0;
  double max_residual_mass_error = 0.0;
  std::int64_t points = 0;
};
DecompositionCheck check_decomposition(std::int64_t points);

enum class ReplicaCoupling : std::uint8_t {
  // Replica r uses the same draws from every initial state.
  kCommon,
  // Every (init, replica) pair gets its own lane.
  kIndependent,
};

struct TvConfig {
  ChainSpec spec{};
  std::vector<double> inits{0.0, 2.0};
  std::vector<std::int64_t> steps{100};
  std::int64_t replicas = 100000;
  int bins = 64;
  ReplicaCoupling coupling = ReplicaCoupling::kCommon;
  std::uint64_t seed = 1;
  void validate() const;
};

struct TvReport {
  std::vector<double> inits;
  std::vector<std::int64_t> steps;
  // tv[s][i][j] between inits i and j after steps[s] steps.
  std::vector<std::vector<std::vector<double>>> tv;
  std::vector<double> max_tv;  // per step count
  // Mean binned TV of two independent samples of the law at the last step
  // count, estimated from the pooled histogram.
  double noise_floor = 0.0;
  std::string coupling;

  nlohmann::json to_json() const;
};

// Binned over the state space: [0, 2] for the split chain, [0, pooled max]
// for Lindley.
TvReport tv_convergence_check(const TvConfig& cfg);

// Endpoints X_n of `replicas` trajectories from x0 on lanes
// lane_base .. lane_base + replicas - 1.
std::vector<double> sample_endpoints(const ChainSpec& spec, std::uint64_t seed, double x0, std::int64_t n,
                                     std::int64_t replicas, std::uint32_t lane_base, bool split = true);

}  // namespace regenlab::harris
