#include <gtest/gtest.h>

#include <cmath>

#include "regenlab/errors.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/regen/cycle_law.hpp"
#include "regenlab/stats/tests.hpp"
#include "regenlab/walk/walk.hpp"

namespace rc = regenlab::core;
namespace rr = regenlab::regen;
namespace rw = regenlab::walk;

namespace {

rc::DrivingStream skewed_walk(std::uint64_t seed) { return {seed, rc::Alphabet::skip_free_walk(0.4, 0.2)}; }

}  // namespace

TEST(SimulateWalk, DeterministicPlusOne) {
  const rw::WalkConfig cfg{rc::Alphabet::degenerate(1.0), 500};
  const auto path = rw::simulate_walk(cfg, {1, rc::Alphabet::degenerate(1.0)});
  ASSERT_EQ(path.length(), 500);
  for (int n = 0; n <= 500; ++n) EXPECT_EQ(path.s[n], n);
}

TEST(SimulateWalk, LawOfLargeNumbers) {
  const rw::WalkConfig cfg{rc::Alphabet::skip_free_walk(0.4, 0.2), 1000000};
  const auto path = rw::simulate_walk(cfg, skewed_walk(31));
  EXPECT_NEAR(path.s.back() / 1e6, 0.2, 0.003);
}

TEST(SimulateWalk, IncrementsMatchStream) {
  const auto s = skewed_walk(4);
  const auto path = rw::simulate_walk({rc::Alphabet::skip_free_walk(0.4, 0.2), 1000}, s);
  for (int n = 1; n <= 1000; ++n) EXPECT_EQ(path.s[n] - path.s[n - 1], s.sample_at(n));
}

TEST(WalkConfig, ZeroDriftIsRejected) {
  const rw::WalkConfig cfg{rc::Alphabet::skip_free_walk(0.3, 0.3), 10};
  EXPECT_THROW(cfg.validate(), regenlab::ConfigError);
  const rw::WalkConfig neg{rc::Alphabet({-1.0, 1.0}, {0.7, 0.3}), 10};
  EXPECT_THROW(neg.validate(), regenlab::ConfigError);
  EXPECT_NO_THROW((rw::WalkConfig{rc::Alphabet::skip_free_walk(0.4, 0.2), 10}.validate()));
}

TEST(FutureEvent, FirstStepDownFailsAtLagOne) {
  // Alphabet {-1} only: every future fails immediately.
  const rc::DrivingStream s(1, rc::Alphabet::degenerate(-1.0));
  const auto v = rr::evaluate_future(rw::last_exit_events(), s, 0, 10);
  EXPECT_TRUE(v.is_fails());
  EXPECT_EQ(v.horizon_used, 1);
}

TEST(FutureEvent, DipAtLagTwoFailsAtTwo) {
  const rc::DrivingStream s(1, rc::Alphabet::skip_free_walk(0.4, 0.2));
  // Find a base n where xi_{n+1} = +1 and xi_{n+2} = xi_{n+3} = -1.
  std::int64_t n = 0;
  while (!(s.sample_at(n + 1) == 1.0 && s.sample_at(n + 2) == -1.0 && s.sample_at(n + 3) == -1.0)) ++n;
  const auto strict = rr::evaluate_future(rw::last_exit_events(), s, n, 10);
  EXPECT_EQ(strict, rr::FutureVerdict::fails(2));
  const auto weak = rr::evaluate_future(rw::future_event(rw::Inequality::kWeak), s, n, 10);
  EXPECT_EQ(weak, rr::FutureVerdict::fails(3));
}

TEST(FutureEvent, IncreasingPathNeverFails) {
  const rc::DrivingStream s(1, rc::Alphabet::degenerate(1.0));
  for (std::int64_t n = 0; n < 50; ++n) {
    EXPECT_TRUE(rr::evaluate_future(rw::last_exit_events(), s, n, 100).is_undecided());
  }
  rr::BreakConfig cfg;
  cfg.horizon = 100;
  cfg.max_time = 50;
  rw::WalkAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), rw::last_exit_events(), cfg);
  EXPECT_EQ(r.taus.size(), 51u);
}

TEST(FutureEvent, DirectEvaluatorMatchesStepper) {
  const auto s = skewed_walk(12);
  for (auto ineq : {rw::Inequality::kWeak, rw::Inequality::kStrict}) {
    const auto direct = rw::future_event_on_path(ineq, s, 5000, 300);
    ASSERT_TRUE(direct.has_direct());
    for (std::int64_t n = 0; n <= 5000; ++n) {
      for (std::int64_t h : {1, 7, 300}) {
        ASSERT_EQ(rr::evaluate_future(direct, s, n, h), rr::evaluate_future(direct, s, n, h, true)) << n << " " << h;
      }
    }
    // Outside the precomputed range the stepper answers.
    EXPECT_EQ(rr::evaluate_future(direct, s, 6000, 20), rr::evaluate_future(rw::future_event(ineq), s, 6000, 20));
    EXPECT_EQ(rr::evaluate_future(direct, s.shift(3), 10, 20),
              rr::evaluate_future(rw::future_event(ineq), s.shift(3), 10, 20));
  }
}

TEST(FutureEvent, VerdictsAreMonotoneInHorizon) {
  const auto s = skewed_walk(8);
  const auto f = rw::future_event(rw::Inequality::kWeak);
  for (std::int64_t n = 0; n < 2000; ++n) {
    const auto a = rr::evaluate_future(f, s, n, 16);
    const auto b = rr::evaluate_future(f, s, n, 64);
    if (a.is_fails()) EXPECT_EQ(a, b);
  }
}

TEST(OccurrenceDensity, WeakEventMatchesGamblersRuin) {
  const std::int64_t N = 200000;
  const auto s = skewed_walk(2026);
  rr::BreakConfig cfg;
  cfg.horizon = 2000;
  cfg.max_time = N;
  cfg.store_segments = false;
  rr::PartialSumAdapter adapter;
  const auto f = rw::future_event_on_path(rw::Inequality::kWeak, s, N, cfg.horizon);
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), f, cfg);
  EXPECT_NEAR(rw::occurrence_density(r, N), 0.5, 0.01);
}

TEST(TruncatedProbability, MonotoneAndConverges) {
  const auto law = rc::Alphabet::skip_free_walk(0.4, 0.2);
  for (auto [ineq, limit] : {std::pair{rw::Inequality::kWeak, 0.5}, std::pair{rw::Inequality::kStrict, 0.2}}) {
    double prev = 1.0;
    for (int j = 0; j <= 12; ++j) {
      const double v = rw::truncated_future_probability(law, std::int64_t{1} << j, ineq);
      EXPECT_LE(v, prev + 1e-12);
      EXPECT_GE(v, limit - 1e-12);
      prev = v;
    }
    EXPECT_NEAR(prev, limit, 1e-6);
  }
}

TEST(TruncatedProbability, StrictDensityAgreesWithExtrapolation) {
  const std::int64_t N = 200000;
  const auto s = skewed_walk(77);
  rr::BreakConfig cfg;
  cfg.horizon = 1024;
  cfg.max_time = N;
  cfg.store_segments = false;
  rr::PartialSumAdapter adapter;
  const auto f = rw::future_event_on_path(rw::Inequality::kStrict, s, N, cfg.horizon);
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), f, cfg);
  const double target = rw::truncated_future_probability(rc::Alphabet::skip_free_walk(0.4, 0.2), 1024, rw::Inequality::kStrict);
  const double density = rw::occurrence_density(r, N);
  EXPECT_NEAR(density, target, 4.0 * std::sqrt(target * (1 - target) / N) * 3.0);
}

TEST(TwoSidedRecords, DeterministicPathGivesEveryIndex) {
  const rc::DrivingStream s(1, rc::Alphabet::degenerate(1.0));
  const auto r = rw::two_sided_record_scan(s, {rc::Alphabet::degenerate(1.0), 100}, 50);
  ASSERT_EQ(r.taus.size(), 101u);
  for (std::int64_t k = 0; k <= 100; ++k) EXPECT_EQ(r.taus[k], k);
}

TEST(TwoSidedRecords, SandwichAndSkipFreeLadder) {
  const auto s = skewed_walk(5);
  const rw::WalkConfig cfg{rc::Alphabet::skip_free_walk(0.4, 0.2), 100000};
  const auto r = rw::two_sided_record_scan(s, cfg, 500);
  ASSERT_GT(r.taus.size(), 1000u);
  EXPECT_EQ(rw::check_sandwich(r.taus, s, 500), -1);
  const auto path = rw::simulate_walk(cfg, s);
  double record = 0.0;
  for (std::int64_t n = 1; n <= cfg.N; ++n) {
    if (path.s[n] > record) {
      EXPECT_EQ(path.s[n], record + 1.0);
      record = path.s[n];
    }
  }
}

TEST(TwoSidedRecords, SandwichCheckCatchesNonRecords) {
  const auto s = skewed_walk(5);
  const auto path = rw::simulate_walk({rc::Alphabet::skip_free_walk(0.4, 0.2), 100}, s);
  std::int64_t bad = 1;
  while (path.s[bad] > path.s[bad - 1]) ++bad;
  EXPECT_EQ(rw::check_sandwich({bad}, s, 10), bad);
}

TEST(TwoSidedRecords, GapLawIsProportionalToExactE) {
  namespace ro = regenlab::oracle;
  const auto alphabet = ro::RationalAlphabet::skip_free_walk(ro::Rational(2, 5), ro::Rational(1, 5));
  ro::EnumerationConfig ec;
  ec.T = 6;
  const auto exact = ro::enumerate_exact(alphabet, ro::past_strict_record(), ro::future_walk(6, true), ec);
  ASSERT_FALSE(exact.e_prob.empty()) << exact.e_witness;

  const auto s = skewed_walk(99);
  const auto r = rw::two_sided_record_scan(s, {rc::Alphabet::skip_free_walk(0.4, 0.2), 300000}, 1000);
  ASSERT_GE(r.cycles.size(), 10000u);
  const auto law = rr::cycle_law(
      r.cycles,
      [&](std::int64_t n) {
        const auto it = exact.e_prob.find(n);
        return it == exact.e_prob.end() ? 0.0 : it->second.get_d();
      },
      static_cast<std::int64_t>(exact.e_prob.rbegin()->first), 0.01);
  EXPECT_FALSE(law.flatness.reject) << law.to_json().dump();
  EXPECT_GT(law.a_hat, 0.0);
}

TEST(TwoSidedRecords, SegmentsPassIidSuite) {
  const auto s = skewed_walk(123);
  const auto r = rw::two_sided_record_scan(s, {rc::Alphabet::skip_free_walk(0.4, 0.2), 300000}, 1000);
  const auto gaps = r.gaps();
  ASSERT_GE(gaps.size(), 10000u);
  const std::size_t half = gaps.size() / 2;
  const std::span<const double> g(gaps);
  const auto ks = regenlab::stats::ks_two_sample(g.first(half), g.subspan(half), 0.01);
  EXPECT_FALSE(ks.reject) << ks.p_value;
  const auto perm = regenlab::stats::permutation_independence(g.first(gaps.size() - 1), g.subspan(1), 999, 7, 0.01);
  EXPECT_FALSE(perm.reject) << perm.p_value;
}
