#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "regenlab/bins/bins.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"

namespace rb = regenlab::bins;
namespace rc = regenlab::core;
namespace ro = regenlab::oracle;
using ro::Rational;

namespace {

rc::DrivingStream geometric(std::uint64_t seed) { return rc::DrivingStream(seed, rc::GeometricLaw{0.5}); }

rc::DrivingStream two_three(std::uint64_t seed) {
  return rc::DrivingStream(seed, rc::Alphabet({2, 3}, {0.5, 0.5}));
}

// Independent reference for f: walk particles one by one from the top.
rb::BinState reference_step(const rb::BinState& x, std::int64_t xi) {
  std::vector<std::int64_t> top_first(x.counts.rbegin(), x.counts.rend());
  std::int64_t seen = 0;
  std::size_t bin = top_first.size();
  for (std::size_t b = 0; b < top_first.size() && bin == top_first.size(); ++b)
    for (std::int64_t p = 0; p < top_first[b]; ++p)
      if (++seen == xi) bin = b;
  if (bin == top_first.size()) {
    ++top_first.back();
  } else if (bin == 0) {
    top_first.insert(top_first.begin(), 1);
  } else {
    ++top_first[bin - 1];
  }
  return rb::BinState::from_counts({top_first.rbegin(), top_first.rend()});
}

}  // namespace

TEST(StepBins, ExamplesOfEachCase) {
  EXPECT_EQ(rb::step_bins(rb::BinState{}, 1).counts, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(rb::step_bins(rb::BinState::from_counts({3, 2}), 4).counts, (std::vector<std::int64_t>{3, 3}));
  EXPECT_EQ(rb::step_bins(rb::BinState::from_counts({2}), 5).counts, (std::vector<std::int64_t>{3}));
  EXPECT_THROW(rb::step_bins(rb::BinState{}, 0), regenlab::DomainError);
  EXPECT_THROW(rb::BinState::from_counts({2, 0, 1}), regenlab::ConfigError);
}

TEST(StepBins, MatchesParticleWalkAndConservesMass) {
  const auto s = geometric(3);
  rb::BinState x = rb::BinState::from_counts({4, 1, 2});
  for (std::int64_t n = 1; n <= 5000; ++n) {
    const auto xi = static_cast<std::int64_t>(s.sample_at(n));
    const auto expect = reference_step(x, xi);
    const auto before = x.total;
    rb::step_bins_inplace(x, xi);
    ASSERT_EQ(x.counts, expect.counts) << "n=" << n;
    ASSERT_EQ(x.total, before + 1);
    ASSERT_TRUE(x.valid());
  }
}

TEST(StepBins, DisplayPadsWithZeros) {
  const auto x = rb::BinState::from_counts({5, 3});
  EXPECT_EQ(x.display(3), (std::vector<std::int64_t>{0, 0, 5, 3}));
  EXPECT_EQ(rb::encode_display({2, 1}), 2.0 * 1024 + 1);
  EXPECT_THROW(rb::encode_display({1024}), regenlab::DomainError);
}

TEST(BasicScan, AllOnesBreaksEveryStepAfterTheRun) {
  const rc::DrivingStream ones(1, rc::Alphabet::degenerate(1));
  for (std::int64_t k : {0, 2, 5}) {
    rb::BasicConfig cfg;
    cfg.depth = k;
    cfg.breaks.max_time = 200;
    const auto s = rb::scan_bins_basic(ones, cfg);
    ASSERT_EQ(s.scan.taus.front(), k + 1);
    ASSERT_EQ(static_cast<std::int64_t>(s.scan.taus.size()), 200 - k);
    EXPECT_EQ(s.h_violations, 0);
    EXPECT_EQ(s.min_gap, 1);
  }
}

TEST(BasicScan, RejectsLawWithoutOnes) {
  EXPECT_THROW(rb::scan_bins_basic(two_three(1), {}), regenlab::ConfigError);
}

TEST(BasicScan, LadderFrequencyMatchesProduct) {
  const double target = rb::ladder_probability(rc::GeometricLaw{0.5}, 1, 64);
  EXPECT_NEAR(target, 0.288788, 1e-6);
  EXPECT_NEAR(rb::ladder_occurrence(geometric(17), 1, 64, 400000), target, 0.005);
}

TEST(BasicScan, OnesRunPromisesTheDisplayExactly) {
  rb::BasicConfig cfg;
  cfg.depth = 2;
  cfg.breaks.max_time = 50000;
  cfg.initial = rb::BinState::from_counts({5, 3, 7});
  const auto s = rb::scan_bins_basic(geometric(5), cfg);
  EXPECT_GT(s.h_count, 1000);
  EXPECT_EQ(s.h_violations, 0);
  ASSERT_GT(s.scan.cycles.size(), 100u);
  for (std::size_t k = 0; k < s.scan.cycles.size(); ++k)
    ASSERT_EQ(static_cast<std::int64_t>(s.display[k].size()), s.scan.cycles[k].gap() * 3);
}

TEST(BasicScan, ShorterRunDoesNotPromiseTheDisplay) {
  // k ones leave the old top bin in X_n(-k); only k + 1 ones clear it.
  const rb::BinState x = rb::BinState::from_counts({4, 6});
  auto y = x;
  for (int i = 0; i < 2; ++i) rb::step_bins_inplace(y, 1);
  EXPECT_EQ(y.display(2), (std::vector<std::int64_t>{6, 1, 1}));
  rb::step_bins_inplace(y, 1);
  EXPECT_EQ(y.display(2), (std::vector<std::int64_t>{1, 1, 1}));
}

TEST(BasicScan, GapOfOneOccurs) {
  rb::BasicConfig cfg;
  cfg.breaks.max_time = 20000;
  const auto s = rb::scan_bins_basic(geometric(8), cfg);
  const auto g = s.scan.gaps();
  EXPECT_GT(std::count(g.begin(), g.end(), 1.0), 0);
}

TEST(BasicScan, TraceIsTheTopBinCount) {
  rb::BasicConfig cfg;
  cfg.breaks.max_time = 5000;
  const auto s = rb::scan_bins_basic(geometric(9), cfg);
  ASSERT_FALSE(s.scan.cycles.empty());
  for (std::size_t k = 0; k < s.scan.cycles.size(); ++k)
    for (std::size_t i = 0; i < s.scan.cycles[k].trace.size(); ++i)
      ASSERT_EQ(s.scan.cycles[k].trace[i], static_cast<double>(s.display[k][i]));
}

TEST(BasicScan, EventsAgreeWithOracleEvents) {
  const auto s = rc::DrivingStream(21, rc::Alphabet({1, 2, 3}, {0.5, 0.25, 0.25}));
  const auto h = rb::ones_run(1);
  const auto f = rb::ladder_future(1);
  const auto oh = ro::past_run_of_ones(2);
  const auto of = ro::future_bins(5);
  std::vector<int> xi{0};
  for (std::int64_t i = 1; i <= 3000; ++i) xi.push_back(static_cast<int>(s.sample_at(i)));
  for (std::int64_t n = 0; n + 5 <= 2995; ++n) {
    ASSERT_EQ(h(regenlab::regen::History(n, s, nullptr)), oh(ro::PastAccess(xi.data() + 1, n, oh.window)))
        << "n=" << n;
    const bool fut = !regenlab::regen::evaluate_future(f, s, n, 5).is_fails();
    ASSERT_EQ(fut, of(ro::FutureAccess(xi.data() + 1 + n, 5))) << "n=" << n;
  }
}

TEST(BasicScan, RatioIsFlatUnderTheExactOracle) {
  const ro::RationalAlphabet three({1, 2, 3}, {Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  ro::EnumerationConfig cfg;
  cfg.T = 5;
  const auto law = ro::enumerate_exact(three, ro::past_run_of_ones(2), ro::future_bins(5), cfg);
  const auto v = ro::verify_iid_segments_exact(law);
  EXPECT_TRUE(v.pass) << v.witness_history;
  ASSERT_TRUE(v.flatness_checked);
  EXPECT_TRUE(v.flatness_pass) << v.flatness_witness;
}

TEST(BasicScan, TraceLawsAgreeAcrossSeedsAndStarts) {
  std::vector<std::vector<double>> m;
  for (std::uint64_t seed : {31u, 32u})
    for (const auto& init : {rb::BinState{}, rb::BinState::from_counts({5, 3, 7})}) {
      rb::BasicConfig cfg;
      cfg.depth = 1;
      cfg.initial = init;
      cfg.breaks.max_time = 2000;
      const auto s = geometric(seed);
      const auto scan = rb::scan_bins_basic(s, cfg);
      m.push_back(rb::display_marginal(s, init, 1, scan.scan.taus.front(), 30000));
    }
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) EXPECT_LT(regenlab::stats::tv_categorical(m[i], m[j]), 0.03);
}

TEST(ChraWord, TwoThreeWordIsShortAndCoversRandomStates) {
  const auto w = rb::find_chra_word(2, 3);
  EXPECT_EQ(w.m, 2);
  EXPECT_EQ(w.word, (std::vector<std::int64_t>{2}));
  EXPECT_EQ(w.block, (std::vector<std::int64_t>{3, 2, 3}));
  // Direct block replay on configurations unrelated to the search profiles.
  const auto s = rc::DrivingStream(4, rc::GeometricLaw{0.6});
  for (std::int64_t t = 0; t < 2000; ++t) {
    std::vector<std::int64_t> counts;
    const auto len = 1 + static_cast<std::int64_t>(s.sample_at(t * 20 + 1)) % 6;
    for (std::int64_t i = 0; i < len; ++i) counts.push_back(static_cast<std::int64_t>(s.sample_at(t * 20 + 2 + i)));
    ASSERT_GE(rb::replay_block(rb::BinState::from_counts(counts), w.block), 2);
  }
}

TEST(ChraWord, EmptyWordFailsForTwoThree) {
  // (x_{-1}, x_0) = (1, 2): 3 -> (1, 3), then 3 <= x_0 opens a bin of 1.
  EXPECT_EQ(rb::replay_block(rb::BinState::from_counts({1, 2}), {3, 3}), 1);
}

TEST(ChraWord, OtherPairsAndErrors) {
  const auto w = rb::find_chra_word(3, 5);
  EXPECT_EQ(w.block.front(), 5);
  EXPECT_EQ(w.block.back(), 5);
  EXPECT_EQ(static_cast<std::int64_t>(w.block.size()), w.m + 1);
  EXPECT_THROW(rb::find_chra_word(2, 4), regenlab::ConfigError);
  EXPECT_THROW(rb::find_chra_word(3, 2), regenlab::ConfigError);
  EXPECT_THROW(rb::find_chra_word(3, 5, 2), regenlab::DomainError);
}

TEST(PrimeScan, AllCoordinatesEqualI1AtEveryH) {
  for (std::int64_t k : {0, 1, 3}) {
    rb::PrimeConfig cfg;
    cfg.depth = k;
    cfg.breaks.max_time = 400000;
    const auto s = rb::scan_bins_prime(two_three(11 + static_cast<std::uint64_t>(k)), cfg);
    EXPECT_EQ(s.r, 2 * (k + 1));
    EXPECT_GT(s.bins.h_count, 100) << "k=" << k;
    EXPECT_EQ(s.bins.h_violations, 0) << "k=" << k;
    EXPECT_TRUE(s.min_gap_ok) << "min gap " << s.bins.min_gap << " exclusion " << s.exclusion;
    EXPECT_GT(s.bins.scan.cycles.size(), 10u);
  }
}

TEST(PrimeScan, SmallestGapLeavesRoomForTheNextBlock) {
  // F_n caps xi_{n+l} at i1 + l - 1, so the next block's leading i2 cannot
  // start before lag i2 - i1 + 1: gaps are at least r + m + i2 - i1 + 1.
  rb::PrimeConfig cfg;
  cfg.breaks.max_time = 400000;
  const auto s = rb::scan_bins_prime(two_three(2), cfg);
  const auto g = s.bins.scan.gaps();
  const double smallest = static_cast<double>(s.r + s.word.m + cfg.i2 - cfg.i1 + 1);
  EXPECT_EQ(s.bins.min_gap, s.r + s.word.m + cfg.i2 - cfg.i1 + 1);
  EXPECT_GT(std::count(g.begin(), g.end(), smallest), 0);
  EXPECT_GT(std::count(g.begin(), g.end(), smallest + 1), 0);
}

TEST(PrimeScan, Preconditions) {
  EXPECT_THROW(rb::scan_bins_prime(geometric(1), {}), regenlab::ConfigError);
  rb::PrimeConfig cfg;
  cfg.i1 = 2;
  cfg.i2 = 5;
  EXPECT_THROW(rb::scan_bins_prime(two_three(1), cfg), regenlab::ConfigError);
}

// ------------------------------------------------------------------ links

TEST(StepLinks, Examples) {
  rb::LinkState x;
  auto o = rb::step_links(x, {0.7}, {true}, 1);
  EXPECT_EQ(x.positions, (std::vector<double>{-0.7, 0.0}));
  EXPECT_EQ(o.parent_id, 0);

  rb::LinkState y;
  y.positions = {-1.0, 0.0};
  y.ids = {0, 1};
  o = rb::step_links(y, {0.3, 0.3}, {false, false}, 2);
  EXPECT_EQ(y.positions, (std::vector<double>{-1.0, -1.0, 0.0}));
  EXPECT_EQ(o.parent_rank, -1);

  rb::LinkState z;
  z.positions = {-1.0, 0.0};
  z.ids = {0, 1};
  o = rb::step_links(z, {0.2, 0.5}, {true, true}, 2);
  ASSERT_EQ(z.size(), 3u);
  EXPECT_NEAR(z.positions[0], -1.2, 1e-15);
  EXPECT_NEAR(z.positions[1], -0.2, 1e-15);
  EXPECT_EQ(z.positions[2], 0.0);
  EXPECT_EQ(o.parent_id, 1);
  EXPECT_TRUE(z.valid());
}

TEST(LinkDriving, LengthsAreUnitExponentials) {
  const rb::LinkDriving d(3, 0.5, 2.0);
  std::vector<double> a, b;
  for (std::int64_t n = 1; n <= 400; ++n)
    for (std::int64_t j : {0, 1, 63, 64, 4095, 4096, 262143, 300000}) a.push_back(d.length(n, j) / 2.0);
  const rc::DrivingStream e(4, rc::ExponentialLaw{1.0});
  for (std::int64_t i = 1; i <= 20000; ++i) b.push_back(e.sample_at(i));
  EXPECT_GT(regenlab::stats::ks_two_sample(a, b).p_value, 0.001);
  double m = 0.0;
  for (double v : a) m += v;
  EXPECT_NEAR(m / static_cast<double>(a.size()), 1.0, 0.05);
}

TEST(LinkDriving, NeighbouringLengthsAreUncorrelated) {
  const rb::LinkDriving d(8, 0.5);
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = d.length(i, 5), y = d.length(i, 6);
    sx += x, sy += y, sxy += x * y, sxx += x * x, syy += y * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  EXPECT_LT(std::abs(corr), 0.03);
}

TEST(LinkDriving, StepMatchesExplicitStep) {
  const rb::LinkDriving d(12, 0.3, 1.5);
  rb::LinkState x, y;
  for (std::int64_t n = 0; n < 3000; ++n) {
    std::vector<double> l(x.size());
    std::vector<bool> q(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      l[j] = d.length(n + 1, static_cast<std::int64_t>(j));
      q[j] = d.active(n + 1, static_cast<std::int64_t>(j));
    }
    const auto a = d.step(x, n, n + 1);
    const auto b = rb::step_links(y, l, q, n + 1);
    ASSERT_EQ(a.parent_id, b.parent_id) << "n=" << n;
    ASSERT_EQ(a.nu, b.nu);
    ASSERT_EQ(x.positions, y.positions);
    ASSERT_EQ(x.ids, y.ids);
    ASSERT_TRUE(x.valid());
  }
}

TEST(LinkDriving, ExceedsMatchesBruteForce) {
  const rb::LinkDriving d(2, 0.5);
  rb::LinkConstants c;
  c.b = 3.5;
  c.b0 = 3.7;
  for (std::int64_t n = 1; n <= 300; ++n) {
    const double threshold = 0.5 + static_cast<double>(n % 7);
    const std::int64_t from = n % 5, size = 500 + 37 * (n % 11);
    bool brute = false;
    for (std::int64_t j = from; j < size; ++j) brute = brute || d.length(n, j) - c.c(j) > threshold;
    const auto j = d.exceeds(n, from, size, threshold, [&](std::int64_t r) { return c.c(r); });
    ASSERT_EQ(j >= 0, brute) << "n=" << n;
    if (j >= 0) EXPECT_GT(d.length(n, j) - c.c(j), threshold);
  }
}

TEST(LinkDriving, FullActivityGivesNuZero) {
  const rb::LinkDriving d(1, 1.0);
  for (std::int64_t n = 1; n <= 1000; ++n) ASSERT_EQ(d.nu(n, 100), 0);
  EXPECT_TRUE(rb::f1_holds(d, 5, 64));
  EXPECT_EQ(rb::f1_probability(1.0, 64), 1.0);
}

TEST(Links, F1FrequencyMatchesProduct) {
  const rb::LinkDriving d(6, 0.5);
  std::int64_t hits = 0;
  const std::int64_t n = 100000;
  for (std::int64_t i = 0; i < n; ++i) hits += rb::f1_holds(d, i, 64);
  EXPECT_NEAR(rb::f1_probability(0.5, 64), 0.288788, 1e-6);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.288788, 0.01);
}

TEST(Links, ConstantsFollowTheStaircase) {
  rb::LinksConfig cfg;
  const auto k = rb::calibrate_links(cfg, 4);
  EXPECT_NEAR(k.b, k.b_exact, 0.1);
  EXPECT_GT(k.b0, 0.0);
  const double zero_until = (1 + cfg.epsilon) * (k.b0 + k.b);
  EXPECT_EQ(k.c(static_cast<std::int64_t>(std::floor(zero_until))), 0.0);
  const auto j2 = static_cast<std::int64_t>(std::floor((1 + cfg.epsilon) * (k.b0 + 3 * k.b)));
  EXPECT_DOUBLE_EQ(k.c(j2), 2 * k.a * (1 - cfg.epsilon));
}

TEST(Links, AttachmentHoldsOnceEnoughBlocksAreKept) {
  rb::LinksConfig cfg;
  cfg.p = 1.0;
  cfg.epsilon = 0.1;
  cfg.steps = 30000;
  cfg.calibration_steps = 20000;
  const rb::LinkDriving d(5, 1.0);
  cfg.blocks = 4;
  const auto s = rb::scan_links(d, cfg);
  ASSERT_GT(s.scan.cycles.size(), 100u);
  EXPECT_GT(s.attachment_checks, 10000);
  EXPECT_EQ(s.attachment_violations, 0) << "first at " << s.first_violation_time;
  for (std::size_t k = 0; k < s.scan.cycles.size(); ++k)
    ASSERT_EQ(static_cast<std::int64_t>(s.traces[k].size()), s.scan.cycles[k].gap() * (cfg.depth + 1));
}

TEST(Links, SingleBlockLeaksLinksToOldParticles) {
  rb::LinksConfig cfg;
  cfg.p = 1.0;
  cfg.epsilon = 0.1;
  cfg.steps = 50000;
  cfg.calibration_steps = 20000;
  cfg.blocks = 1;
  const auto s = rb::scan_links(rb::LinkDriving(5, 1.0), cfg);
  EXPECT_GT(s.attachment_violations, 0);
}

TEST(Links, HalfActivityBudgetIsNegligible) {
  rb::LinksConfig cfg;
  cfg.calibration_steps = 20000;
  const auto b = rb::links_budget(cfg, 3, 2000, 20000);
  EXPECT_LT(b.log10_f2, -15.0);
  EXPECT_LT(b.block_pass, 0.8);
  EXPECT_LT(b.log10_a(), -20.0);
}
