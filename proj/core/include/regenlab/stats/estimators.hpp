#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenlab::stats {

struct TailFit {
  double rate = 0.0;       // alpha-hat: log-survival slope, negated
  double intercept = 0.0;  // log-survival at 0
  double r_squared = 0.0;
  std::int64_t k_lo = 0;   // fitted range of thresholds
  std::int64_t k_hi = 0;
  std::size_t n_samples = 0;

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kMinTailExceedances = 30;

// Least squares of log P(X > k) on k over thresholds from the sample median
// up to the last threshold with at least 30 exceedances.
TailFit geometric_tail_fit(std::span<const std::int64_t> sample);

struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_cycles = 0;

  bool overlaps(const RateEstimate& other) const noexcept { return lo <= other.hi && other.lo <= hi; }
  nlohmann::json to_json() const;
};

// mean(rewards) / mean(gaps) with a delta-method confidence interval.
RateEstimate renewal_reward(std::span<const double> gaps, std::span<const double> rewards, double level = 0.95);

struct Binning {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 64;

  int bin_of(double x) const noexcept;
  // Equal-width binning over the pooled range of both samples.
  static Binning pooled(std::span<const double> a, std::span<const double> b, int bins = 64);
};

// Half L1 distance between binned empirical laws.
double tv_empirical(std::span<const double> a, std::span<const double> b, const Binning& binning);
double tv_empirical(std::span<const double> a, std::span<const double> b, int bins = 64);
// Half L1 distance between empirical laws of exact values (discrete data).
double tv_categorical(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double normal_quantile(double p);

}  // namespace regenlab::stats
