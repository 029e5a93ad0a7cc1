#include <gtest/gtest.h>

#include <cmath>

#include "regenlab/errors.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/regen/cycle_law.hpp"
#include "regenlab/regen/cycle_suite.hpp"
#include "regenlab/regen/scanner.hpp"
#include "regenlab/stats/tests.hpp"
#include "regenlab/walk/walk.hpp"

namespace rc = regenlab::core;
namespace rr = regenlab::regen;
namespace rw = regenlab::walk;

namespace {

rc::DrivingStream plus_one() { return {1, rc::Alphabet::degenerate(1.0)}; }
rc::DrivingStream skewed_walk(std::uint64_t seed) { return {seed, rc::Alphabet::skip_free_walk(0.4, 0.2)}; }

rr::BreakConfig config(std::int64_t N, std::int64_t H, std::int64_t m = 1) {
  rr::BreakConfig c;
  c.max_time = N;
  c.horizon = H;
  c.min_separation = m;
  return c;
}

}  // namespace

TEST(BreakConfig, Validation) {
  EXPECT_THROW(config(10, 0).validate(), regenlab::ConfigError);
  EXPECT_THROW(config(0, 10).validate(), regenlab::ConfigError);
  EXPECT_THROW(config(10, 10, 0).validate(), regenlab::ConfigError);
  EXPECT_EQ(rr::undecided_policy_from_string("escalate"), rr::UndecidedPolicy::kEscalate);
  EXPECT_THROW(rr::undecided_policy_from_string("sometimes"), regenlab::ConfigError);
}

TEST(EvaluateFuture, AlwaysOccursImmediately) {
  EXPECT_TRUE(rr::evaluate_future(rr::FutureEventSpec::always(), plus_one(), 3, 5).is_occurs());
}

TEST(EvaluateFuture, FiniteLookaheadOccursAtItsEnd) {
  const auto f = rr::FutureEventSpec::next_symbol("up", [](double x) { return x > 0; });
  EXPECT_EQ(rr::evaluate_future(f, plus_one(), 0, 10), rr::FutureVerdict::occurs(1));
}

TEST(EvaluateFuture, UndecidedCarriesHorizon) {
  EXPECT_EQ(rr::evaluate_future(rw::future_event(rw::Inequality::kWeak), plus_one(), 0, 37),
            rr::FutureVerdict::undecided(37));
}

TEST(DecideFuture, PoliciesDifferOnUndecided) {
  auto cfg = config(10, 8);
  const auto f = rw::future_event(rw::Inequality::kWeak);
  cfg.policy = rr::UndecidedPolicy::kTruncate;
  auto d = rr::decide_future(f, plus_one(), 0, cfg);
  EXPECT_TRUE(d.occurs);
  EXPECT_TRUE(d.truncated);
  cfg.policy = rr::UndecidedPolicy::kStrict;
  EXPECT_FALSE(rr::decide_future(f, plus_one(), 0, cfg).occurs);
  cfg.policy = rr::UndecidedPolicy::kEscalate;
  cfg.escalation_cap = 64;
  d = rr::decide_future(f, plus_one(), 0, cfg);
  EXPECT_TRUE(d.occurs);
  EXPECT_EQ(d.verdict.horizon_used, 64);
}

TEST(DecideFuture, EscalationFindsLateFailure) {
  // +1 then -1 forever would be a drift violation; use a two-symbol stream
  // and search for a base whose weak future fails beyond lag 8.
  const auto s = skewed_walk(3);
  const auto f = rw::future_event(rw::Inequality::kWeak);
  auto cfg = config(10, 8);
  cfg.policy = rr::UndecidedPolicy::kEscalate;
  cfg.escalation_cap = 4096;
  for (std::int64_t n = 0; n < 5000; ++n) {
    const auto full = rr::evaluate_future(f, s, n, 4096);
    if (full.is_fails() && full.horizon_used > 8) {
      const auto d = rr::decide_future(f, s, n, cfg);
      EXPECT_FALSE(d.occurs);
      EXPECT_EQ(d.verdict, full);
      return;
    }
  }
  FAIL() << "no late failure found";
}

TEST(ScanBreakTimes, DegenerateWalkBreaksEverywhere) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(), rr::FutureEventSpec::always(),
                                      config(200, 10));
  ASSERT_EQ(r.taus.size(), 201u);
  for (std::int64_t k = 0; k <= 200; ++k) EXPECT_EQ(r.taus[k], k);
  EXPECT_FALSE(r.delay.has_value());
  ASSERT_EQ(r.cycles.size(), 200u);
  EXPECT_EQ(r.cycles[5].segment.values, std::vector<double>{1.0});
}

TEST(ScanBreakTimes, NoBreaksGivesDiagnostic) {
  rr::PartialSumAdapter adapter;
  const rc::DrivingStream down(1, rc::Alphabet::degenerate(-1.0));
  const auto r = rr::scan_break_times(adapter, down, rr::PastEventSpec::always(),
                                      rw::future_event(rw::Inequality::kWeak), config(50, 10));
  EXPECT_TRUE(r.taus.empty());
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(ScanBreakTimes, ThinningRespectsSeparationAndEvents) {
  const auto s = skewed_walk(9);
  const auto f = rw::future_event(rw::Inequality::kWeak);
  for (std::int64_t m : {1, 2, 5}) {
    rr::PartialSumAdapter adapter;
    const auto cfg = config(20000, 200, m);
    const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), f, cfg);
    ASSERT_GT(r.taus.size(), 100u);
    for (std::size_t k = 0; k < r.taus.size(); ++k) {
      if (k > 0) EXPECT_GE(r.taus[k] - r.taus[k - 1], m);
      EXPECT_FALSE(rr::evaluate_future(f, s, r.taus[k], cfg.horizon).is_fails());
    }
    // Greedy from the left: every skipped index with F occurring lies within
    // m of the previous break time.
    std::size_t k = 0;
    for (std::int64_t n = r.taus.front(); n <= 20000; ++n) {
      while (k + 1 < r.taus.size() && r.taus[k + 1] <= n) ++k;
      if (r.taus[k] == n) continue;
      if (!rr::evaluate_future(f, s, n, cfg.horizon).is_fails()) EXPECT_LT(n - r.taus[k], m);
    }
  }
}

TEST(ScanBreakTimes, DelaySegmentIsStoredSeparately) {
  const auto s = skewed_walk(21);
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), rw::future_event(rw::Inequality::kWeak),
                                      config(5000, 200));
  ASSERT_FALSE(r.taus.empty());
  if (r.taus.front() > 0) {
    ASSERT_TRUE(r.delay.has_value());
    EXPECT_EQ(r.delay->hi, r.taus.front());
  }
  EXPECT_EQ(r.cycles.front().tau_start, r.taus.front());
  for (const auto& c : r.cycles) EXPECT_EQ(static_cast<std::int64_t>(c.segment.length()), c.gap());
}

TEST(ScanBreakTimes, OccurrenceDensityIsOneMinusQOverP) {
  const std::int64_t N = 100000;
  const auto s = skewed_walk(2024);
  rr::PartialSumAdapter adapter;
  auto cfg = config(N, 1000);
  cfg.store_segments = false;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(),
                                      rw::future_event_on_path(rw::Inequality::kWeak, s, N, 1000), cfg);
  EXPECT_NEAR(rw::occurrence_density(r, N), 0.5, 0.01);
}

TEST(ScanBreakTimes, NextZeroConsecutiveBreaksForceZero) {
  const auto s = skewed_walk(4);
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), rw::next_zero_event(),
                                      config(50000, 500));
  int consecutive = 0;
  for (std::size_t k = 0; k + 1 < r.taus.size(); ++k) {
    if (r.taus[k + 1] == r.taus[k] + 1) {
      ++consecutive;
      EXPECT_EQ(s.sample_at(r.taus[k] + 2), 0.0);
      EXPECT_EQ(s.sample_at(r.taus[k + 1] + 1), 0.0);
    }
  }
  EXPECT_GT(consecutive, 100);
  // Adjacent gaps are dependent: a gap of 1 forces the next segment to start with 0.
  std::vector<double> first, next;
  for (const auto& c : r.cycles) {
    if (c.k + 1 < static_cast<std::int64_t>(r.cycles.size())) {
      first.push_back(c.gap() == 1);
      next.push_back(r.cycles[static_cast<std::size_t>(c.k) + 1].segment.values.front() == 0.0);
    }
  }
  EXPECT_TRUE(regenlab::stats::permutation_independence(first, next, 999, 1, 0.01).reject);
}

TEST(FunctionalTraces, DifferenceTraceIsPartialSumOfSegment) {
  const auto s = skewed_walk(6);
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), rw::future_event(rw::Inequality::kWeak),
                                      config(3000, 200));
  for (const auto& c : r.cycles) {
    double sum = 0;
    ASSERT_EQ(static_cast<std::int64_t>(c.trace.size()), c.gap());
    for (std::int64_t i = 0; i < c.gap(); ++i) {
      sum += c.segment.values[static_cast<std::size_t>(i)];
      EXPECT_EQ(c.trace[static_cast<std::size_t>(i)], sum);
    }
  }
  const auto traces = rr::functional_traces(r.cycles, s, [](const rr::CycleView& v, std::int64_t i) {
    double sum = 0;
    for (std::int64_t j = 1; j <= i; ++j) sum += v.xi(v.cycle().tau_start + j);
    return sum;
  });
  for (std::size_t k = 0; k < r.cycles.size(); ++k) EXPECT_EQ(traces[k], r.cycles[k].trace);
}

TEST(FunctionalTraces, OutOfWindowReadIsContractError) {
  const auto s = skewed_walk(6);
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(), rw::future_event(rw::Inequality::kWeak),
                                      config(3000, 200));
  ASSERT_FALSE(r.cycles.empty());
  const auto peek_ahead = [](const rr::CycleView& v, std::int64_t) { return v.xi(v.cycle().tau_end + 1); };
  EXPECT_THROW(rr::functional_traces(r.cycles, s, peek_ahead), regenlab::ContractError);
  const auto look_back = [](const rr::CycleView& v, std::int64_t) { return v.xi(v.cycle().tau_start - 1); };
  EXPECT_THROW(rr::functional_traces(r.cycles, s, look_back, 1), regenlab::ContractError);
  EXPECT_NO_THROW(rr::functional_traces(r.cycles, s, look_back, 2));
}

TEST(History, ReadingBeyondBaseIsMeasurabilityError) {
  const auto s = skewed_walk(1);
  const rr::History h(5, s, nullptr);
  EXPECT_NO_THROW(h.xi(5));
  EXPECT_THROW(h.xi(6), regenlab::MeasurabilityError);
}

TEST(CycleLaw, DeterministicWalk) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(), rr::FutureEventSpec::always(),
                                      config(500, 10));
  const auto law = rr::cycle_law(r.cycles, [](std::int64_t n) { return n == 1 ? 1.0 : 0.0; }, 5);
  EXPECT_EQ(law.gap_pmf.at(1), 1.0);
  EXPECT_EQ(law.a_hat, 1.0);
}

TEST(CycleLaw, NeedsEnoughCycles) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(), rr::FutureEventSpec::always(),
                                      config(50, 10));
  EXPECT_THROW(rr::cycle_law(r.cycles, [](std::int64_t) { return 1.0; }, 5), regenlab::DomainError);
}

TEST(CycleLaw, ZeroFactorProbabilityWithMassIsInconsistent) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(), rr::FutureEventSpec::always(),
                                      config(500, 10));
  EXPECT_THROW(rr::cycle_law(r.cycles, [](std::int64_t) { return 0.0; }, 5), regenlab::InconsistencyError);
}

TEST(CycleLaw, WeakWalkRatiosAreFlatAgainstExactE) {
  namespace ro = regenlab::oracle;
  ro::EnumerationConfig ec;
  ec.T = 6;
  const auto exact = ro::enumerate_exact(ro::RationalAlphabet::skip_free_walk(ro::Rational(2, 5), ro::Rational(1, 5)),
                                         ro::past_always(), ro::future_walk(6, false), ec);
  ASSERT_FALSE(exact.e_prob.empty()) << exact.e_witness;
  EXPECT_EQ(exact.e_prob.at(1), ro::Rational(4, 5));

  const auto s = skewed_walk(77);
  const std::int64_t N = 200000;
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, s, rr::PastEventSpec::always(),
                                      rw::future_event_on_path(rw::Inequality::kWeak, s, N, 2000), config(N, 2000));
  const auto law = rr::cycle_law(
      r.cycles,
      [&](std::int64_t n) {
        const auto it = exact.e_prob.find(n);
        return it == exact.e_prob.end() ? 0.0 : it->second.get_d();
      },
      exact.e_prob.rbegin()->first, 0.01);
  EXPECT_FALSE(law.flatness.reject) << law.to_json().dump();
  EXPECT_GE(law.a_lo, 0.0);
  for (const auto& [n, ratio] : law.ratio) EXPECT_NEAR(ratio, law.a_hat, 0.1) << n;
}

TEST(CyclesCsv, HeaderAndRows) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(), rr::FutureEventSpec::always(),
                                      config(3, 10));
  EXPECT_EQ(rr::cycles_csv(r.cycles),
            "k,tau_start,tau_end,gap,trace\n0,0,1,1,\"[1.0]\"\n1,1,2,1,\"[1.0]\"\n2,2,3,1,\"[1.0]\"\n");
}

TEST(ScanResult, SummaryCarriesHorizon) {
  rr::PartialSumAdapter adapter;
  const auto r = rr::scan_break_times(adapter, plus_one(), rr::PastEventSpec::always(),
                                      rw::future_event(rw::Inequality::kWeak), config(20, 16));
  const auto j = r.summary();
  EXPECT_EQ(j.at("horizon"), 16);
  EXPECT_EQ(j.at("truncated_breaks"), 21);
}

namespace {

// Cycles with geometric gaps and a trace that walks up by one per step.
std::vector<rr::Cycle> synthetic_cycles(std::size_t count, std::uint64_t seed, bool repeat_gaps) {
  const rc::CounterRng rng(seed);
  std::vector<rr::Cycle> out;
  std::int64_t t = 0, previous = 1;
  for (std::size_t k = 0; k < count; ++k) {
    std::int64_t g = 1;
    while (rng.uniform(static_cast<std::int64_t>(k), static_cast<std::uint32_t>(g), rc::Tag::kSynthetic) < 0.5) ++g;
    if (repeat_gaps && k % 2 == 1) g = previous;
    previous = g;
    rr::Cycle c;
    c.k = static_cast<std::int64_t>(k);
    c.tau_start = t;
    c.tau_end = t + g;
    for (std::int64_t i = 1; i <= g; ++i) c.trace.push_back(static_cast<double>(i));
    out.push_back(std::move(c));
    t += g;
  }
  return out;
}

}  // namespace

TEST(CycleSuite, IidCyclesPass) {
  const auto rep = rr::cycle_suite(synthetic_cycles(4000, 3, false));
  EXPECT_TRUE(rep.tests_pass) << rep.to_json().dump();
  EXPECT_TRUE(rep.tail_pass());
  EXPECT_NEAR(rep.gap_tail->rate, std::log(2.0), 0.1 * std::log(2.0));
  EXPECT_DOUBLE_EQ(rep.alpha_per_test, 0.01 / 3);
}

TEST(CycleSuite, RepeatedGapsAreCaughtByTheAdjacentTest) {
  const auto rep = rr::cycle_suite(synthetic_cycles(4000, 3, true));
  EXPECT_FALSE(rep.tests_pass);
  EXPECT_TRUE(rep.checks.front().adjacent.reject);
}

TEST(CycleSuite, FeaturesAndTooFewCycles) {
  const auto cycles = synthetic_cycles(10, 4, false);
  const auto inc = rr::cycle_feature(cycles, rr::CycleFeature::kIncrement);
  for (std::size_t i = 0; i < cycles.size(); ++i) EXPECT_EQ(inc[i], static_cast<double>(cycles[i].gap()));
  const auto rep = rr::cycle_suite(cycles);
  EXPECT_FALSE(rep.tests_pass);
  EXPECT_FALSE(rep.diagnostic.empty());
  rr::Cycle bare;
  bare.tau_end = 2;
  EXPECT_THROW(rr::cycle_feature({bare}, rr::CycleFeature::kMax), regenlab::DomainError);
}
