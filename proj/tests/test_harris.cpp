#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "regenlab/errors.hpp"
#include "regenlab/harris/harris.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"

namespace rh = regenlab::harris;
namespace rc = regenlab::core;
namespace rs = regenlab::stats;

namespace {

rc::DrivingStream stream(std::uint64_t seed) { return rc::DrivingStream(seed, rc::UniformLaw{}); }

}  // namespace

TEST(Densities, KernelSplitsIntoPhiAndResidualOnAGrid) {
  const auto c = rh::check_decomposition(1000);
  EXPECT_LE(c.max_error, 1e-12);
  EXPECT_GE(c.min_slack, 0.0);
  EXPECT_GE(c.min_residual, 0.0);
  EXPECT_LE(c.max_residual_mass_error, 1e-12);
}

TEST(Densities, PointValues) {
  EXPECT_EQ(rh::kernel_density(0.5, 0.3), 1.0);
  EXPECT_EQ(rh::kernel_density(0.5, 1.3), 0.0);
  EXPECT_EQ(rh::phi_density(0.75), 2.0);
  EXPECT_EQ(rh::residual_density(0.5, 0.3), 2.0);
  EXPECT_EQ(rh::residual_density(0.5, 0.75), 0.0);
  EXPECT_EQ(rh::residual_density(0.5, 1.2), 2.0);
  EXPECT_THROW(rh::residual_density(1.5, 0.8), regenlab::DomainError);
  EXPECT_THROW(rh::kernel_density(-0.1, 0.8), regenlab::DomainError);
}

TEST(StepSplit, RejectsStatesOutsideTheSpace) {
  const auto s = stream(1);
  EXPECT_THROW(rh::step_split(rh::ChainSpec::split(), -0.01, s, 0), regenlab::DomainError);
  EXPECT_THROW(rh::step_split(rh::ChainSpec::split(), 2.01, s, 0), regenlab::DomainError);
  EXPECT_THROW(rh::step_split(rh::ChainSpec::lindley(), -1.0, s, 0), regenlab::DomainError);
  EXPECT_NO_THROW(rh::step_split(rh::ChainSpec::split(), 2.0, s, 0));
}

TEST(StepSplit, OutsideVUsesTheFullKernel) {
  const auto s = stream(2);
  for (std::int64_t n = 0; n < 50; ++n) {
    const auto r = rh::step_split(rh::ChainSpec::split(), 1.5, s, n);
    EXPECT_FALSE(r.regenerated);
    EXPECT_EQ(r.x, 0.75 + s.rng().uniform(n + 1, 0, rc::Tag::kKernel));
  }
}

TEST(StepSplit, SuccessfulCoinDrawsFromPhi) {
  const auto spec = rh::ChainSpec::split();
  const auto s = stream(3);
  int successes = 0;
  for (std::int64_t n = 0; n < 2000; ++n) {
    const auto r = rh::step_split(spec, 0.5, s, n);
    EXPECT_EQ(r.regenerated, rh::coin(spec, {s.rng(), 0}, n + 1));
    if (r.regenerated) {
      ++successes;
      EXPECT_GE(r.x, 0.5);
      EXPECT_LE(r.x, 1.0);
    } else {
      EXPECT_GT(rh::residual_density(0.5, r.x), 0.0) << r.x;
    }
  }
  EXPECT_NEAR(successes / 2000.0, 0.5, 0.05);
}

TEST(StepSplit, OneStepLawMatchesTheDirectKernel) {
  const auto spec = rh::ChainSpec::split();
  const std::int64_t m = 1000000;
  const auto split = rh::sample_endpoints(spec, 4, 0.3, 1, m, 0, true);
  const auto direct = rh::sample_endpoints(spec, 4, 0.3, 1, m, static_cast<std::uint32_t>(m), false);
  EXPECT_LT(rs::ks_statistic(split, direct), 0.005);
  EXPECT_NEAR(rs::mean(split), 0.65, 0.002);
}

TEST(StepSplit, LindleyFromZeroRegeneratesEveryTime) {
  const auto spec = rh::ChainSpec::lindley();
  const auto s = stream(5);
  for (std::int64_t n = 0; n < 100; ++n) {
    const auto r = rh::step_split(spec, 0.0, s, n);
    EXPECT_TRUE(r.regenerated);
    EXPECT_EQ(r.x, rh::step_direct(spec, {s.rng(), 0}, n + 1, 0.0));
  }
}

TEST(RegenerationScan, SuccessTimesAreCoinSuccessesOnV) {
  const auto spec = rh::ChainSpec::split();
  const auto s = stream(6);
  const auto scan = rh::regeneration_scan(spec, s, 5000, 1.7);
  std::vector<std::int64_t> expected;
  double x = 1.7;
  for (std::int64_t n = 0; n < 5000; ++n) {
    if (spec.in_small_set(x) && rh::coin(spec, {s.rng(), 0}, n + 1)) expected.push_back(n + 1);
    x = rh::step_split(spec, x, s, n).x;
  }
  EXPECT_EQ(scan.success_times, expected);
  ASSERT_GE(scan.cycles.size(), 100u);
  for (const auto& c : scan.cycles) {
    ASSERT_EQ(static_cast<std::int64_t>(c.trace.size()), c.gap());
    EXPECT_GE(c.trace.front(), 0.5);
    EXPECT_LE(c.trace.front(), 1.0);
  }
}

TEST(RegenerationScan, GenericScannerFindsTheSameTimes) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    for (const auto& spec : {rh::ChainSpec::split(), rh::ChainSpec::lindley()}) {
      const auto s = stream(seed);
      const double x0 = spec.kind == rh::ChainKind::kSplit ? 2.0 : 3.0;
      const auto native = rh::regeneration_scan(spec, s, 20000, x0);
      EXPECT_EQ(rh::generic_success_times(spec, s, 20000, x0), native.success_times) << rh::to_string(spec.kind);
      EXPECT_GT(native.success_times.size(), 1000u);
    }
  }
}

TEST(RegenerationScan, GapsAreIidAndAperiodic) {
  const auto s = stream(10);
  const auto scan = rh::regeneration_scan(rh::ChainSpec::split(), s, 60000, 0.0);
  const auto g = scan.gaps();
  ASSERT_GE(g.size(), 10000u);
  const std::size_t half = g.size() / 2;
  const auto ks = rs::ks_two_sample(std::span(g).first(half), std::span(g).subspan(half), 0.01);
  EXPECT_FALSE(ks.reject) << ks.p_value;
  const auto perm = rs::permutation_independence(std::span(g).first(g.size() - 1), std::span(g).subspan(1), 999,
                                                 11, 0.01);
  EXPECT_FALSE(perm.reject) << perm.p_value;
  EXPECT_GT(std::count(g.begin(), g.end(), 1.0), 0);
}

TEST(RegenerationScan, CycleStartDoesNotPredictThePreviousCycle) {
  const auto scan = rh::regeneration_scan(rh::ChainSpec::split(), stream(12), 20000, 0.0);
  std::vector<double> before, after;
  for (std::size_t i = 0; i + 1 < scan.cycles.size(); ++i) {
    const auto& t = scan.cycles[i].trace;
    before.push_back(*std::max_element(t.begin(), t.end()));
    after.push_back(scan.cycles[i + 1].trace.front());
  }
  const auto perm = rs::permutation_independence(before, after, 999, 13, 0.01);
  EXPECT_FALSE(perm.reject) << perm.p_value;
}

TEST(RegenerationScan, TooShortGivesADiagnostic) {
  const auto scan = rh::regeneration_scan(rh::ChainSpec::split(), stream(14), 1, 2.0);
  EXPECT_TRUE(scan.cycles.empty());
  EXPECT_FALSE(scan.diagnostic.empty());
  EXPECT_THROW(rh::regeneration_scan(rh::ChainSpec::split(), stream(14), 0, 2.0), regenlab::ConfigError);
}

TEST(TvConvergence, PointMassesAtTimeZeroAreDisjoint) {
  rh::TvConfig cfg;
  cfg.steps = {0};
  cfg.replicas = 10000;
  const auto r = rh::tv_convergence_check(cfg);
  EXPECT_EQ(r.max_tv.front(), 1.0);
}

TEST(TvConvergence, CoupledEstimatorDecaysBelowOnePercent) {
  rh::TvConfig cfg;
  cfg.steps = {5, 20, 100};
  const auto r = rh::tv_convergence_check(cfg);
  EXPECT_LT(r.max_tv[2], 0.01);
  EXPECT_LE(r.max_tv[1], r.max_tv[0]);
  EXPECT_LE(r.max_tv[2], r.max_tv[1]);
}

TEST(TvConvergence, IndependentEstimatorSitsAtTheNoiseFloor) {
  rh::TvConfig cfg;
  cfg.steps = {5, 20, 100};
  cfg.coupling = rh::ReplicaCoupling::kIndependent;
  const auto r = rh::tv_convergence_check(cfg);
  EXPECT_NEAR(r.max_tv[2], r.noise_floor, 0.25 * r.noise_floor);
  EXPECT_LE(r.max_tv[2], r.max_tv[0] + r.noise_floor);
  EXPECT_LE(r.max_tv[1], r.max_tv[0] + r.noise_floor);
}

TEST(TvConvergence, StationaryMeanIsOne) {
  const auto x = rh::sample_endpoints(rh::ChainSpec::split(), 15, 2.0, 60, 100000, 0);
  EXPECT_NEAR(rs::mean(x), 1.0, 0.005);
}

TEST(TvConvergence, LindleyForgetsItsStart) {
  rh::TvConfig cfg;
  cfg.spec = rh::ChainSpec::lindley();
  cfg.inits = {0.0, 5.0};
  cfg.steps = {200};
  cfg.replicas = 20000;
  EXPECT_LT(rh::tv_convergence_check(cfg).max_tv.front(), 0.01);
}

TEST(TvConvergence, RejectsBadConfigs) {
  rh::TvConfig cfg;
  cfg.replicas = 100;
  EXPECT_THROW(rh::tv_convergence_check(cfg), regenlab::ConfigError);
  cfg.replicas = 10000;
  cfg.inits = {3.0};
  EXPECT_THROW(rh::tv_convergence_check(cfg), regenlab::DomainError);
  EXPECT_THROW(rh::ChainSpec::lindley(1.0, 0.5), regenlab::ConfigError);
  EXPECT_THROW(rh::chain_kind_from_string("foo"), regenlab::ConfigError);
}

TEST(TvConvergence, EndpointsAreDeterministic) {
  const auto a = rh::sample_endpoints(rh::ChainSpec::split(), 16, 0.0, 30, 20000, 0);
  const auto b = rh::sample_endpoints(rh::ChainSpec::split(), 16, 0.0, 30, 20000, 0);
  EXPECT_EQ(a, b);
}
