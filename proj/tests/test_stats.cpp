#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numeric>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/law.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/stats/calibration.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"

namespace rs = regenlab::stats;
using regenlab::core::CounterRng;
using regenlab::core::Tag;

namespace {

std::vector<double> uniforms(std::uint64_t seed, std::size_t n, std::uint32_t lane = 0, double shift = 0.0) {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.uniform(static_cast<std::int64_t>(i), lane, Tag::kSynthetic) + shift;
  return out;
}

std::vector<std::int64_t> geometric_sample(std::uint64_t seed, std::size_t n, double r) {
  const CounterRng rng(seed);
  const regenlab::core::GeometricLaw g{r};
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<std::int64_t>(regenlab::core::sample_law(g, rng.uniform(static_cast<std::int64_t>(i), 0, Tag::kSynthetic)));
  }
  return out;
}

}  // namespace

TEST(KolmogorovSmirnov, IdenticalSamplesGiveZero) {
  const auto a = uniforms(1, 500);
  const auto r = rs::ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.reject);
}

TEST(KolmogorovSmirnov, TiesAreHandledOnPooledSample) {
  const std::vector<double> a{1, 1, 2, 2, 3};
  const std::vector<double> b{1, 2, 2, 3, 3};
  EXPECT_NEAR(rs::ks_statistic(a, b), 0.2, 1e-15);
}

TEST(KolmogorovSmirnov, EmptySampleThrows) {
  const std::vector<double> a;
  const auto b = uniforms(1, 50);
  EXPECT_THROW(rs::ks_two_sample(a, b), regenlab::DomainError);
}

TEST(KolmogorovSmirnov, DetectsShift) {
  const auto a = uniforms(3, 10000, 0);
  const auto b = uniforms(3, 10000, 1, 0.2);
  const auto r = rs::ks_two_sample(a, b, 0.01);
  EXPECT_TRUE(r.reject);
  EXPECT_NEAR(r.statistic, 0.2, 0.03);
}

TEST(KolmogorovSmirnov, NullRejectionRateIsNominal) {
  const auto c = rs::calibrate_null(rs::CalibratedTest::kKolmogorovSmirnov, 1000, 10000, 17, 0.05);
  EXPECT_TRUE(c.pass()) << c.to_json().dump();
}

TEST(KolmogorovQ, KnownValues) {
  EXPECT_NEAR(rs::kolmogorov_q(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(rs::kolmogorov_q(1.6276), 0.01, 1e-4);
  EXPECT_EQ(rs::kolmogorov_q(0.0), 1.0);
}

TEST(DistanceCorrelation, FastMatchesNaive) {
  const auto x = uniforms(5, 300, 0);
  auto y = uniforms(5, 300, 1);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::round(4 * (y[i] + x[i] * x[i]));  // ties and dependence
  std::vector<std::vector<double>> xr, yr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xr.push_back({x[i]});
    yr.push_back({y[i]});
  }
  EXPECT_NEAR(rs::distance_correlation(x, y), rs::distance_correlation(xr, yr), 1e-10);
}

TEST(DistanceCorrelation, LinearRelationGivesOne) {
  const auto x = uniforms(6, 400);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] - 1.0;
  EXPECT_NEAR(rs::distance_correlation(x, y), 1.0, 1e-9);
}

TEST(PermutationIndependence, IdenticalVariablesGiveMinimalPValue) {
  const auto u = uniforms(7, 300);
  const auto r = rs::permutation_independence(u, u, 999, 1);
  EXPECT_LE(r.p_value, 1.0 / 1000.0 + 1e-15);
  EXPECT_TRUE(r.reject);
}

TEST(PermutationIndependence, DeterministicGivenSeed) {
  const auto u = uniforms(8, 250, 0);
  const auto v = uniforms(8, 250, 1);
  EXPECT_EQ(rs::permutation_independence(u, v, 999, 4).p_value, rs::permutation_independence(u, v, 999, 4).p_value);
}

TEST(PermutationIndependence, NullPValuesAreUniform) {
  std::vector<double> pvals;
  for (int rep = 0; rep < 200; ++rep) {
    const auto u = uniforms(100 + rep, 200, 0);
    const auto v = uniforms(100 + rep, 200, 1);
    pvals.push_back(rs::permutation_independence(u, v, 999, rep).p_value);
  }
  std::vector<double> reference(2000);
  for (std::size_t i = 0; i < reference.size(); ++i) reference[i] = (i + 0.5) / reference.size();
  EXPECT_FALSE(rs::ks_two_sample(pvals, reference, 0.01).reject);
}

TEST(PermutationIndependence, MultivariateFeatures) {
  const auto a = uniforms(9, 250, 0);
  const auto b = uniforms(9, 250, 1);
  std::vector<std::vector<double>> u, v, w;
  for (std::size_t i = 0; i < a.size(); ++i) {
    u.push_back({a[i], b[i]});
    v.push_back({a[i] * a[i], 1.0});
    w.push_back({b[(i * 7) % a.size()], a[(i * 13) % a.size()]});
  }
  EXPECT_TRUE(rs::permutation_independence(u, v, 999, 2, 0.01).reject);
  EXPECT_EQ(rs::permutation_independence(u, v, 999, 2).n_samples, 250u);
}

TEST(ChiSquare, PoolsSmallCells) {
  const std::vector<double> counts{50, 30, 15, 4, 1};
  const std::vector<double> probs{0.5, 0.3, 0.15, 0.04, 0.01};
  const auto r = rs::chi_square_gof(counts, probs);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_FALSE(r.reject);
}

TEST(ChiSquare, RejectsWrongLaw) {
  const std::vector<double> counts{700, 300};
  const std::vector<double> probs{0.5, 0.5};
  EXPECT_TRUE(rs::chi_square_gof(counts, probs, 0.01).reject);
}

TEST(GeometricTailFit, RecoversRate) {
  const auto sample = geometric_sample(11, 100000, 0.5);
  const auto fit = rs::geometric_tail_fit(sample);
  EXPECT_NEAR(fit.rate, std::log(2.0), 0.1 * std::log(2.0));
  EXPECT_GT(fit.r_squared, 0.95);
}

TEST(GeometricTailFit, ConstantDataHasNoTail) {
  const std::vector<std::int64_t> sample(5000, 3);
  EXPECT_THROW(rs::geometric_tail_fit(sample), regenlab::FitError);
}

TEST(GeometricTailFit, TooFewPointsIsAnError) {
  const auto sample = geometric_sample(12, 500, 0.5);
  EXPECT_THROW(rs::geometric_tail_fit(sample), regenlab::FitError);
}

TEST(RenewalReward, UnitCyclesGiveUnitRate) {
  const std::vector<double> ones(200, 1.0);
  const auto r = rs::renewal_reward(ones, ones);
  EXPECT_EQ(r.rate, 1.0);
  EXPECT_EQ(r.hi - r.lo, 0.0);
}

TEST(RenewalReward, RewardEqualToGapGivesOne) {
  const auto g = geometric_sample(13, 1000, 0.5);
  const std::vector<double> gaps(g.begin(), g.end());
  EXPECT_NEAR(rs::renewal_reward(gaps, gaps).rate, 1.0, 1e-15);
}

TEST(RenewalReward, CoversTrueRate) {
  const auto g = geometric_sample(14, 5000, 0.5);
  const auto u = uniforms(14, 5000);
  std::vector<double> gaps(g.begin(), g.end()), rewards(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rewards[i] = gaps[i] * 0.5 + (u[i] - 0.5);
  const auto r = rs::renewal_reward(gaps, rewards);
  EXPECT_LE(r.lo, 0.5);
  EXPECT_GE(r.hi, 0.5);
}

TEST(RenewalReward, ZeroGapsAreAnError) {
  const std::vector<double> zeros(200, 0.0);
  EXPECT_THROW(rs::renewal_reward(zeros, zeros), regenlab::DomainError);
}

TEST(TotalVariation, TrivialCases) {
  const auto a = uniforms(15, 1000);
  EXPECT_EQ(rs::tv_empirical(a, a), 0.0);
  std::vector<double> b(a);
  for (auto& x : b) x += 5.0;
  EXPECT_EQ(rs::tv_empirical(a, b), 1.0);
  EXPECT_EQ(rs::tv_categorical(std::vector<double>{1, 1, 2}, std::vector<double>{3, 4}), 1.0);
}

// Two independent samples of one law: each bin difference is approximately
// normal with variance 2 p (1 - p) / n, so E[TV] = (bins / 2) sqrt(2/pi) sd.
TEST(TotalVariation, SameLawSitsAtTheBinomialNoiseFloor) {
  const std::size_t n = 100000;
  const double p = 1.0 / 64;
  const double floor = 32.0 * std::sqrt(2.0 / M_PI) * std::sqrt(2.0 * p * (1 - p) / n);
  std::vector<double> tv;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = uniforms(16 + seed, n, 0);
    const auto b = uniforms(16 + seed, n, 1);
    tv.push_back(rs::tv_empirical(a, b, rs::Binning{0.0, 1.0, 64}));
  }
  EXPECT_NEAR(rs::mean(tv), floor, 0.1 * floor);
  EXPECT_LT(*std::max_element(tv.begin(), tv.end()), 0.02);
}

TEST(Calibration, ChiSquareAndPermutationNullRates) {
  for (auto t : {rs::CalibratedTest::kChiSquare, rs::CalibratedTest::kPermutation}) {
    const auto c = rs::calibrate_null(t, 1000, t == rs::CalibratedTest::kChiSquare ? 1000 : 200, 23, 0.05);
    EXPECT_TRUE(c.pass()) << c.to_json().dump();
  }
}
