#include <benchmark/benchmark.h>

#include "regenlab/bins/bins.hpp"
#include "regenlab/contact/contact.hpp"
#include "regenlab/core/counter_rng.hpp"
#include "regenlab/harris/harris.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/stats/tests.hpp"
#include "regenlab/walk/walk.hpp"

namespace rc = regenlab::core;

static void BM_CounterRngWord(benchmark::State& state) {
  const rc::CounterRng rng(1);
  std::int64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rng.word(i++, 0, rc::Tag::kScalar));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CounterRngWord);

static void BM_WalkBreakScan(benchmark::State& state) {
  const auto law = rc::Alphabet::skip_free_walk(0.4, 0.2);
  regenlab::regen::BreakConfig cfg;
  cfg.horizon = 2000;
  cfg.max_time = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const rc::DrivingStream s(seed++, law);
    regenlab::walk::WalkAdapter adapter;
    benchmark::DoNotOptimize(regenlab::regen::scan_break_times(adapter, s, regenlab::regen::PastEventSpec::always(),
                                                               regenlab::walk::future_event(
                                                                   regenlab::walk::Inequality::kWeak),
                                                               cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WalkBreakScan)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Contact2Step(benchmark::State& state) {
  const regenlab::contact::ContactDriving d(2, regenlab::contact::DescendantLaw::independent(0.75));
  auto x = regenlab::contact::LatticeConfig2::single_site();
  std::int64_t n = 0;
  for (auto _ : state) {
    regenlab::contact::step2_inplace(x, d, n++);
    if (x.extinct()) x = regenlab::contact::LatticeConfig2::single_site(x.r);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Contact2Step);

static void BM_KuczekScan(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const regenlab::contact::ContactDriving d(seed++, regenlab::contact::DescendantLaw::independent(0.75));
    benchmark::DoNotOptimize(regenlab::contact::kuczek_scan(d, state.range(0), 1000));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KuczekScan)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_BinsStep(benchmark::State& state) {
  regenlab::bins::BinState x;
  const rc::DrivingStream s(3, rc::GeometricLaw{0.5});
  std::int64_t n = 1;
  for (auto _ : state) regenlab::bins::step_bins_inplace(x, static_cast<std::int64_t>(s.sample_at(n++)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BinsStep);

static void BM_HarrisSplitStep(benchmark::State& state) {
  const auto spec = regenlab::harris::ChainSpec::split();
  const rc::DrivingStream s(4, rc::UniformLaw{});
  double x = 2.0;
  std::int64_t n = 0;
  for (auto _ : state) {
    x = regenlab::harris::step_split(spec, x, s, n++).x;
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HarrisSplitStep);

static void BM_ExactEnumeration(benchmark::State& state) {
  namespace ro = regenlab::oracle;
  const auto alphabet = ro::RationalAlphabet::skip_free_walk(ro::Rational(1, 4), ro::Rational(1, 4));
  ro::EnumerationConfig cfg;
  cfg.T = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ro::enumerate_exact(alphabet, ro::past_always(), ro::future_walk(6, false), cfg));
}
BENCHMARK(BM_ExactEnumeration)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_KsStatistic(benchmark::State& state) {
  const rc::CounterRng rng(5);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform(static_cast<std::int64_t>(i), 0, rc::Tag::kSynthetic);
    b[i] = rng.uniform(static_cast<std::int64_t>(i), 1, rc::Tag::kSynthetic);
  }
  for (auto _ : state) benchmark::DoNotOptimize(regenlab::stats::ks_statistic(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KsStatistic)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
