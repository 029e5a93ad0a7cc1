#include <gtest/gtest.h>

#include "regenlab/errors.hpp"
#include "regenlab/oracle/conditions.hpp"
#include "regenlab/oracle/exact.hpp"

namespace ro = regenlab::oracle;
using ro::Rational;

namespace {

ro::RationalAlphabet quarter_walk() { return ro::RationalAlphabet::skip_free_walk(Rational(1, 4), Rational(1, 4)); }

ro::EnumerationConfig cfg(int T, int min_sep = 1) {
  ro::EnumerationConfig c;
  c.T = T;
  c.min_separation = min_sep;
  return c;
}

}  // namespace

TEST(RationalAlphabet, RejectsWeightsNotSummingToOne) {
  EXPECT_THROW(ro::RationalAlphabet({0, 1}, {Rational(1, 2), Rational(1, 3)}), regenlab::ConfigError);
  EXPECT_THROW(ro::RationalAlphabet({0}, {Rational(0)}), regenlab::ConfigError);
}

TEST(EnumerateExact, DegenerateAlphabetGivesUnitGaps) {
  const ro::RationalAlphabet one({1}, {Rational(1)});
  const auto law = ro::enumerate_exact(one, ro::past_always(), ro::future_always(1), cfg(4));
  ASSERT_EQ(law.support.size(), 1u);
  const auto& [o, m] = *law.support.begin();
  EXPECT_EQ(o.tau0, 0);
  EXPECT_EQ(o.tau1, 1);
  EXPECT_EQ(m, 1);
}

TEST(EnumerateExact, MassesSumToOneExactly) {
  const auto law = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk(4, false), cfg(6));
  EXPECT_EQ(law.total(), 1);
  EXPECT_EQ(law.sequences, 59049u);
}

TEST(EnumerateExact, GuardRaisesSizeError) {
  ro::EnumerationConfig c = cfg(20);
  EXPECT_THROW(ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk(6, false), c),
               regenlab::SizeError);
}

TEST(EnumerateExact, PartitionDoesNotChangeResult) {
  ro::EnumerationConfig one = cfg(5);
  one.threads = 1;
  ro::EnumerationConfig four = cfg(5);
  four.threads = 4;
  const auto a = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk(4, false), one);
  const auto b = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk(4, false), four);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_EQ(a.histories, b.histories);
}

TEST(ExactWalk, VariantAIsIidWithFlatRatio) {
  const auto law = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk(6, false), cfg(6));
  const auto v = ro::verify_iid_segments_exact(law);
  EXPECT_TRUE(v.pass) << v.witness_history << " " << v.witness_segment;
  ASSERT_TRUE(v.flatness_checked);
  EXPECT_TRUE(v.flatness_pass) << v.flatness_witness;
  EXPECT_EQ(v.a, 1);
  // E_{0,1} = {xi_1 >= 0}.
  EXPECT_EQ(law.e_prob.at(1), Rational(3, 4));
}

TEST(ExactWalk, VariantBFailsWithForcedZero) {
  const auto law = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk_next_zero(6), cfg(6));
  const auto v = ro::verify_iid_segments_exact(law);
  EXPECT_FALSE(v.pass);
  const auto forced = law.next_symbol_given_gap(1, 0);
  ASSERT_TRUE(forced.has_value());
  EXPECT_EQ(*forced, 1);
  EXPECT_NE(quarter_walk().probability_of(0), 1);
}

// Greedy thinning with separation 2 removes A_n A_{n+1}, but the event
// {tau_{k+1} = n} still contains (F'_{n-1})^c, and on F'_n that reads
// xi_{n+1}: with xi_n >= 0 it forces xi_{n+1} = 1. The exact law exposes it.
TEST(ExactWalk, VariantCGreedyThinningLeaksTheNextSymbol) {
  const auto law = ro::enumerate_exact(quarter_walk(), ro::past_always(), ro::future_walk_next_zero(6), cfg(6, 2));
  const auto v = ro::verify_iid_segments_exact(law);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.witness_history, "t=0,3;x=0,0,0");
  EXPECT_EQ(v.witness_segment, "g=2;x=1,0");
  EXPECT_EQ(v.conditional, Rational(11, 40));
  EXPECT_EQ(v.reference, Rational(1, 8));
  // Every continuation after a history ending in xi_3 = 0 at tau_1 = 3
  // starts with xi_4 = 1.
  for (const auto& [hist, next] : law.histories) {
    if (hist.rfind("t=0,3;", 0) != 0 || hist.back() != '0') continue;
    for (const auto& [seg, mass] : next)
      if (seg != "none") EXPECT_EQ(seg.substr(seg.find("x=") + 2, 1), "1") << hist << " -> " << seg;
  }
}

TEST(Monotonicity, WalkTrichotomy) {
  const auto a = ro::check_monotonicity(quarter_walk(), ro::future_walk(6, false), 6);
  EXPECT_TRUE(a.pass);
  const auto b = ro::check_monotonicity(quarter_walk(), ro::future_walk_next_zero(6), 6);
  EXPECT_FALSE(b.pass);
  ASSERT_FALSE(b.failing_m.empty());
  EXPECT_EQ(b.failing_m.front(), 1);
  ASSERT_FALSE(b.witnesses.empty());
  EXPECT_NE(b.witnesses.front().first_value, b.witnesses.front().second_value);
  const auto c = ro::check_monotonicity(quarter_walk(), ro::future_walk_next_zero(6), 6, 2);
  EXPECT_TRUE(c.pass);
}

TEST(RestrictionConditions, ReducesToMonotonicityWhenPastIsTrivial) {
  for (const auto& f : {ro::future_walk(4, false), ro::future_walk_next_zero(4)}) {
    const auto c1 = ro::check_monotonicity(quarter_walk(), f, 4);
    const auto c2 = ro::check_restriction_conditions(quarter_walk(), ro::past_always(), f, 4);
    EXPECT_EQ(c1.pass, c2.pass) << f.name;
    EXPECT_EQ(c1.failing_m, c2.failing_m) << f.name;
  }
}

TEST(RestrictionConditions, TwoSidedRecordsPass) {
  const auto v = ro::check_restriction_conditions(quarter_walk(), ro::past_strict_record(), ro::future_walk(4, true), 5, 3);
  EXPECT_TRUE(v.pass) << v.to_json().dump();
}

TEST(RestrictionConditions, PastReadingFutureRaisesMeasurabilityError) {
  EXPECT_THROW(ro::check_restriction_conditions(quarter_walk(), ro::past_reads_future(), ro::future_walk(3, false), 2),
               regenlab::MeasurabilityError);
}

TEST(RestrictionConditions, TwoSidedRecordSegmentsAreIidExactly) {
  const auto law = ro::enumerate_exact(quarter_walk(), ro::past_strict_record(), ro::future_walk(5, true), cfg(6));
  const auto v = ro::verify_iid_segments_exact(law);
  EXPECT_TRUE(v.pass) << v.witness_history << " " << v.witness_segment;
  EXPECT_TRUE(v.flatness_pass) << v.flatness_witness;
}

TEST(RestrictionConditions, BinsRunOfOnesSatisfiesConditions) {
  const ro::RationalAlphabet three({1, 2, 3}, {Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  const auto v = ro::check_restriction_conditions(three, ro::past_run_of_ones(2), ro::future_bins(4), 4, 3);
  EXPECT_TRUE(v.pass) << v.to_json().dump();
  const auto law = ro::enumerate_exact(three, ro::past_run_of_ones(1), ro::future_bins(5), cfg(5));
  const auto iid = ro::verify_iid_segments_exact(law);
  EXPECT_TRUE(iid.pass);
  EXPECT_TRUE(iid.flatness_pass) << iid.flatness_witness;
}

TEST(FutureAccess, ReadOutsideWindowIsContractError) {
  const int xs[3] = {1, 0, -1};
  ro::FutureAccess a(xs, 3);
  EXPECT_EQ(a(3), -1);
  EXPECT_THROW(a(4), regenlab::ContractError);
  EXPECT_THROW(a(0), regenlab::ContractError);
}
