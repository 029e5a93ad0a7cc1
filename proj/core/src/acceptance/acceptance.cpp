#include "regenlab/acceptance/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "regenlab/bins/bins.hpp"
#include "regenlab/contact/contact.hpp"
#include "regenlab/core/driving_stream.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/harris/harris.hpp"
#include "regenlab/oracle/conditions.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/regen/cycle_suite.hpp"
#include "regenlab/stats/calibration.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"
#include "regenlab/walk/walk.hpp"

namespace regenlab::acceptance {

namespace {

using nlohmann::json;
using oracle::Rational;

struct Spec {
  int id;
  const char* title;
  double budget;
};

constexpr Spec kSpecs[] = {
    {1, "walk break-time trichotomy, exact", 60},
    {2, "gap law proportional to Pr(E_0n), exact", 60},
    {3, "walk break-time density", 30},
    {4, "Kuczek mean-cycle identity", 300},
    {5, "contact coupling identities, exact replay", 300},
    {6, "three-state cycle suite", 600},
    {7, "infinite-bin regeneration", 300},
    {8, "random-links model", 600},
    {9, "Harris split chain", 300},
    {10, "null calibration of the statistical tests", 300},
};

const Spec& spec_of(int id) {
  for (const auto& s : kSpecs)
    if (s.id == id) return s;
  throw ConfigError("unknown acceptance criterion " + std::to_string(id));
}

// ------------------------------------------------------------ exact (1, 2)

oracle::RationalAlphabet quarter_walk() {
  return oracle::RationalAlphabet::skip_free_walk(Rational(1, 4), Rational(1, 4));
}

oracle::EnumerationConfig enum_cfg(int T, int min_sep) {
  oracle::EnumerationConfig c;
  c.T = T;
  c.min_separation = min_sep;
  return c;
}

void criterion1(CriterionResult& r) {
  const auto alphabet = quarter_walk();
  constexpr int T = 6, L = 6;

  const auto law_a = oracle::enumerate_exact(alphabet, oracle::past_always(), oracle::future_walk(L, false), enum_cfg(T, 1));
  const auto iid_a = oracle::verify_iid_segments_exact(law_a);
  const auto mono_a = oracle::check_monotonicity(alphabet, oracle::future_walk(L, false), L);
  const bool a = iid_a.pass && mono_a.pass;

  const auto law_b = oracle::enumerate_exact(alphabet, oracle::past_always(), oracle::future_walk_next_zero(L), enum_cfg(T, 1));
  const auto iid_b = oracle::verify_iid_segments_exact(law_b);
  const auto mono_b = oracle::check_monotonicity(alphabet, oracle::future_walk_next_zero(L), L);
  const auto forced = law_b.next_symbol_given_gap(1, 0);
  const bool b = !iid_b.pass && !mono_b.pass && forced.has_value() && *forced == 1;

  const auto law_c = oracle::enumerate_exact(alphabet, oracle::past_always(), oracle::future_walk_next_zero(L), enum_cfg(T, 2));
  const auto iid_c = oracle::verify_iid_segments_exact(law_c);
  const auto mono_c = oracle::check_monotonicity(alphabet, oracle::future_walk_next_zero(L), L, 2);
  const bool c = iid_c.pass && mono_c.pass;

  r.detail = {
      {"T", T},
      {"L", L},
      {"a", {{"expected", "pass"}, {"iid", iid_a.to_json()}, {"monotonicity", mono_a.pass}, {"ok", a}}},
      {"b",
       {{"expected", "fail"},
        {"iid", iid_b.to_json()},
        {"monotonicity", mono_b.to_json()},
        {"P(next = 0 | gap = 1)", forced ? oracle::to_string(*forced) : "undefined"},
        {"ok", b}}},
      {"c", {{"expected", "pass"}, {"iid", iid_c.to_json()}, {"monotonicity_m_ge_2", mono_c.pass}, {"ok", c}}},
  };
  r.pass = a && b && c;
  std::ostringstream os;
  os << "a " << (a ? "pass" : "FAIL") << ", b fails with P(0|gap=1) = "
     << (forced ? oracle::to_string(*forced) : "?") << (b ? "" : " (unexpected)") << ", c "
     << (c ? "pass" : "FAIL: greedy thinning leaks the next symbol, P = " + oracle::to_string(iid_c.conditional) +
                          " vs " + oracle::to_string(iid_c.reference));
  r.note = os.str();
}

void criterion2(CriterionResult& r) {
  const auto law = oracle::enumerate_exact(quarter_walk(), oracle::past_always(), oracle::future_walk(6, false), enum_cfg(6, 1));
  const auto v = oracle::verify_iid_segments_exact(law);
  json ratios = json::object();
  const auto gaps = law.gap_given_ref();
  for (const auto& [n, e] : law.e_prob) {
    const auto it = gaps.find(n);
    if (it != gaps.end() && e != 0) ratios[std::to_string(n)] = oracle::to_string(it->second / e);
  }
  r.detail = {{"flatness", v.to_json()}, {"ratios", ratios}};
  r.pass = v.flatness_checked && v.flatness_pass;
  r.note = "a = " + oracle::to_string(v.a) + " across " + std::to_string(ratios.size()) + " gap values";
}

// ----------------------------------------------------------------- walk (3)

void criterion3(CriterionResult& r, std::uint64_t seed) {
  const std::int64_t N = 1000000, H = 10000;
  const core::DrivingStream s(seed, core::Alphabet::skip_free_walk(0.4, 0.2));
  regen::BreakConfig cfg;
  cfg.horizon = H;
  cfg.max_time = N;
  cfg.store_segments = false;
  regen::PartialSumAdapter adapter;
  const auto f = walk::future_event_on_path(walk::Inequality::kWeak, s, N, H);
  const auto scan = regen::scan_break_times(adapter, s, regen::PastEventSpec::always(), f, cfg);
  const double density = walk::occurrence_density(scan, N);
  const double target = 1.0 - 0.2 / 0.4;
  r.detail = {{"N", N}, {"horizon", H}, {"density", density}, {"target", target}, {"tolerance", 0.01}};
  r.pass = std::abs(density - target) <= 0.01;
  std::ostringstream os;
  os << "density " << std::setprecision(5) << density << " vs " << target;
  r.note = os.str();
}

// -------------------------------------------------------------- contact (4-6)

void criterion4(CriterionResult& r, std::uint64_t seed) {
  const auto law = contact::DescendantLaw::independent(0.75);
  const std::int64_t T = 1000, N = 14000;
  const contact::ContactDriving d(seed, law);
  const auto survival = contact::estimate_survival2(d.shift(1'000'000'000), {250, 500, 1000}, 20000);
  const auto scan = contact::kuczek_scan(d, N, T);
  const auto gaps = scan.scan.gaps();
  const double mg = stats::mean(gaps);
  const double se_gap = std::sqrt(stats::variance(gaps) / static_cast<double>(gaps.size()));
  const double inv = 1.0 / survival.p_hat;
  const double se_inv = survival.std_error / (survival.p_hat * survival.p_hat);
  const double z = std::abs(mg - inv) / std::hypot(se_gap, se_inv);

  std::vector<std::int64_t> igaps;
  for (const auto& c : scan.scan.cycles) igaps.push_back(c.gap());
  json tail_json = nullptr;
  bool tail_ok = false;
  try {
    const auto tail = stats::geometric_tail_fit(igaps);
    tail_json = tail.to_json();
    tail_ok = tail.rate > 0.0 && tail.r_squared > 0.95;
  } catch (const FitError& e) {
    tail_json = e.what();
  }

  const auto clt = contact::speed_and_clt(scan.scan.cycles);
  std::vector<stats::RateEstimate> speeds{clt.speed};
  json seeds = json::array();
  for (std::uint64_t k = 1; k < 10; ++k) {
    const auto sk = contact::kuczek_scan(contact::ContactDriving(seed + k, law), N, T);
    speeds.push_back(contact::speed_and_clt(sk.scan.cycles).speed);
  }
  bool overlap = true;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    seeds.push_back(speeds[i].to_json());
    for (std::size_t j = i + 1; j < speeds.size(); ++j) overlap = overlap && speeds[i].overlaps(speeds[j]);
  }

  const bool enough = gaps.size() >= 10000;
  r.detail = {{"b", 0.75},
              {"T", T},
              {"N", N},
              {"survival", survival.to_json()},
              {"cycles", gaps.size()},
              {"mean_gap", mg},
              {"inverse_p", inv},
              {"z", z},
              {"gap_tail", tail_json},
              {"speed_per_seed", seeds},
              {"ci_overlap", overlap},
              {"clt", clt.to_json()}};
  r.pass = survival.supercritical() && enough && z < 3.0 && tail_ok && overlap && clt.clt_stable(0.2);
  std::ostringstream os;
  os << std::setprecision(4) << "mean gap " << mg << " vs 1/p " << inv << " (z " << z << "), " << gaps.size()
     << " cycles, tail " << (tail_ok ? "ok" : "FAIL") << ", CI overlap " << (overlap ? "ok" : "FAIL")
     << ", CLT change " << clt.variance_change;
  r.note = os.str();
}

void criterion5(CriterionResult& r, std::uint64_t seed) {
  const contact::ContactDriving d2(seed, contact::DescendantLaw::independent(0.75));
  const contact::ContactDriving d3(seed, contact::DescendantLaw::independent(0.9), 0.8);
  const std::int64_t T = 200, checks = 1000;
  std::vector<contact::ReplayReport> reports;
  reports.push_back(contact::replay_cocycle_two_state(d2, checks, T, seed + 1));
  reports.push_back(contact::replay_coupling_two_state(d2, checks, T, seed + 2));
  const auto scan2 = contact::kuczek_scan(d2, 3000, T);
  reports.push_back(contact::replay_cycle_sum_two_state(d2, scan2, checks, seed + 3));
  reports.push_back(contact::replay_cocycle_three_state(d3, checks, T, seed + 4));
  reports.push_back(contact::replay_coupling_three_state(d3, checks, T, seed + 5));
  const auto scan3 = contact::record_scan3(d3, 3000, T);
  reports.push_back(contact::replay_record_shift_three_state(d3, scan3, checks, T, seed + 6));
  reports.push_back(contact::replay_cycle_sum_three_state(d3, scan3, checks, seed + 7));
  json list = json::array();
  bool ok = true;
  std::int64_t total = 0, bad = 0;
  for (const auto& rep : reports) {
    list.push_back(rep.to_json());
    ok = ok && rep.pass();
    total += rep.checks;
    bad += rep.violations;
  }
  r.detail = {{"two_state", {{"b", 0.75}}}, {"three_state", {{"b", 0.9}, {"q", 0.8}}}, {"replays", list}};
  r.pass = ok;
  r.note = std::to_string(total) + " checks, " + std::to_string(bad) + " violations";
}

json three_state_suite(std::uint64_t seed, double q, double b, std::int64_t N, std::int64_t T, bool& pass,
                       std::string& note) {
  json j{{"q", q}, {"b", b}, {"N", N}, {"T", T}};
  const contact::ContactDriving d(seed, contact::DescendantLaw::independent(b), q);
  const auto survival = contact::estimate_survival3(d.shift(1'000'000'000), {250, 500, 1000}, 500);
  j["survival"] = survival.to_json();
  pass = false;
  try {
    const auto scan = contact::record_scan3(d, N, T);
    regen::CycleSuiteConfig cfg;
    cfg.alpha = 0.01;
    cfg.seed = seed;
    const auto suite = regen::cycle_suite(scan.scan.cycles, cfg);
    j["suite"] = suite.to_json();
    const bool enough = suite.cycles >= 5000;
    pass = enough && suite.tests_pass && suite.tail_pass();
    std::ostringstream os;
    os << suite.cycles << " cycles, tests " << (suite.tests_pass ? "pass" : "reject") << ", tail rate "
       << (suite.gap_tail ? suite.gap_tail->rate : 0.0);
    note = os.str();
  } catch (const InconsistencyError& e) {
    j["error"] = e.what();
    std::ostringstream os;
    os << "no cycles: the process dies out (survival to 1000 = " << survival.p_hat << ")";
    note = os.str();
  }
  return j;
}

void criterion6(CriterionResult& r, const AcceptanceOptions& opts) {
  bool pass = false;
  std::string note;
  r.detail["stated"] = three_state_suite(opts.seed, 0.5, 0.9, 12000, 1000, pass, note);
  r.pass = pass;
  r.note = "q = 0.5: " + note;
  if (opts.supplementary) {
    bool sup = false;
    std::string sup_note;
    r.detail["supplementary"] = three_state_suite(opts.seed, 0.8, 0.9, 12000, 1000, sup, sup_note);
    r.detail["supplementary"]["pass"] = sup;
    r.note += "; q = 0.8 supplementary: " + sup_note + (sup ? " (pass)" : " (FAIL)");
  }
}

// ---------------------------------------------------------------- bins (7, 8)

double max_pairwise_tv(const std::vector<std::vector<double>>& samples, bool categorical) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      worst = std::max(worst, categorical ? stats::tv_categorical(samples[i], samples[j])
                                          : stats::tv_empirical(samples[i], samples[j], 64));
  return worst;
}

void criterion7(CriterionResult& r, std::uint64_t seed) {
  const core::Law geometric = core::GeometricLaw{0.5};
  const std::int64_t horizon = 64, depth = 2, samples = 100000;

  const core::DrivingStream s0(seed, geometric);
  const double occurrence = bins::ladder_occurrence(s0, 1, horizon, 1000000);
  const double product = bins::ladder_probability(geometric, 1, horizon);
  const bool ladder_ok = std::abs(occurrence - product) <= 0.005;

  std::vector<std::vector<double>> marginals;
  json runs = json::array();
  for (std::uint64_t k = 0; k < 2; ++k) {
    for (const auto& init : {bins::BinState{}, bins::BinState::from_counts({5, 3, 7})}) {
      const core::DrivingStream s(seed + 100 + k, geometric);
      bins::BasicConfig cfg;
      cfg.depth = depth;
      cfg.initial = init;
      cfg.breaks = {horizon, 1, 20000};
      cfg.breaks.store_segments = false;
      const auto scan = bins::scan_bins_basic(s, cfg);
      if (scan.scan.taus.empty()) throw InconsistencyError("bins: no break time in the burn-in window");
      const auto tau0 = scan.scan.taus.front();
      marginals.push_back(bins::display_marginal(s, init, depth, tau0, samples));
      runs.push_back({{"seed", seed + 100 + k}, {"initial", init.counts}, {"tau0", tau0}});
    }
  }
  const double tv = max_pairwise_tv(marginals, true);
  const bool tv_ok = tv < 0.02;

  bins::PrimeConfig pc;
  pc.depth = 1;
  pc.breaks.max_time = 400000;
  const core::DrivingStream s23(seed + 7, core::Alphabet({2, 3}, {0.5, 0.5}));
  const auto prime = bins::scan_bins_prime(s23, pc);
  const bool word_ok = prime.word.m > 0;
  const bool all_i1 = prime.bins.h_count > 0 && prime.bins.h_violations == 0;
  const bool gap_ok = prime.min_gap_ok && !prime.bins.scan.taus.empty();

  r.detail = {{"ladder", {{"occurrence", occurrence}, {"product", product}, {"samples", 1000000}, {"ok", ladder_ok}}},
              {"trace_tv", {{"depth", depth}, {"samples", samples}, {"max_tv", tv}, {"runs", runs}, {"ok", tv_ok}}},
              {"prime",
               {{"word", prime.word.to_json()},
                {"r", prime.r},
                {"exclusion", prime.exclusion},
                {"min_gap", prime.bins.min_gap},
                {"h_count", prime.bins.h_count},
                {"h_violations", prime.bins.h_violations},
                {"breaks", prime.bins.scan.taus.size()}}}};
  r.pass = ladder_ok && tv_ok && word_ok && all_i1 && gap_ok;
  std::ostringstream os;
  os << std::setprecision(4) << "ladder " << occurrence << " vs " << product << ", trace TV " << tv
     << ", word m = " << prime.word.m << ", H " << prime.bins.h_count << " with " << prime.bins.h_violations
     << " violations, min gap " << prime.bins.min_gap << " > " << prime.exclusion;
  r.note = os.str();
}

json links_run(const bins::LinksConfig& cfg, std::uint64_t seed, std::vector<double>& pooled_trace) {
  const auto scan = bins::scan_links(bins::LinkDriving(seed, cfg.p, cfg.mean_length), cfg);
  pooled_trace.clear();
  for (const auto& t : scan.traces) pooled_trace.insert(pooled_trace.end(), t.begin(), t.end());
  auto j = scan.summary();
  j["seed"] = seed;
  return j;
}

void criterion8(CriterionResult& r, const AcceptanceOptions& opts) {
  const std::uint64_t seed = opts.seed;
  bins::LinksConfig base;
  base.p = 0.5;
  base.epsilon = 0.5;
  const double f1_target = bins::f1_probability(base.p, base.horizon);

  json per_k = json::array();
  bool attachment_ok = true;
  std::vector<double> tv_by_k;
  double f1_freq = 0.0;
  for (std::int64_t K : {16, 32, 64}) {
    auto cfg = base;
    cfg.blocks = K;
    std::vector<double> a, b;
    auto ja = links_run(cfg, seed, a);
    auto jb = links_run(cfg, seed + 1, b);
    if (K == 64) f1_freq = ja["f1_count"].get<double>() / static_cast<double>(cfg.steps + 1);
    const bool attach = ja["breaks"].get<std::int64_t>() > 0 && ja["attachment_violations"] == 0 &&
                        jb["attachment_violations"] == 0;
    attachment_ok = attachment_ok && attach;
    const double tv = (a.empty() || b.empty()) ? 1.0 : stats::tv_empirical(a, b, 64);
    tv_by_k.push_back(tv);
    per_k.push_back({{"K", K}, {"runs", {ja, jb}}, {"trace_tv", (a.empty() || b.empty()) ? json(nullptr) : json(tv)}});
  }
  const bool f1_ok = std::abs(f1_freq - f1_target) <= 0.01;
  const bool tv_ok = tv_by_k.back() < 0.03 && tv_by_k[1] <= tv_by_k[0] && tv_by_k[2] <= tv_by_k[1];
  const auto budget = bins::links_budget(base, seed, 20000, 256);

  r.detail = {{"p", base.p},
              {"epsilon", base.epsilon},
              {"f1", {{"frequency", f1_freq}, {"product", f1_target}, {"ok", f1_ok}}},
              {"per_K", per_k},
              {"attachment_ok", attachment_ok},
              {"trace_tv_ok", tv_ok},
              {"budget_K64", budget.to_json()}};
  r.pass = f1_ok && attachment_ok && tv_ok;
  std::ostringstream os;
  os << std::setprecision(4) << "P(F1) " << f1_freq << " vs " << f1_target << (f1_ok ? " ok" : " FAIL")
     << "; no break times at K in {16,32,64}: log10 P(A_n) ~ " << budget.log10_a() << " (F2 " << budget.log10_f2
     << ", H " << budget.log10_h << ")";
  r.note = os.str();

  if (opts.supplementary) {
    json sup = json::array();
    std::ostringstream ns;
    ns << "; p = 1, eps = 0.1 supplementary violations by K:";
    for (std::int64_t K : {1, 2, 4, 8}) {
      bins::LinksConfig cfg;
      cfg.p = 1.0;
      cfg.epsilon = 0.1;
      cfg.blocks = K;
      cfg.steps = 50000;
      std::vector<double> a, b;
      auto ja = links_run(cfg, seed, a);
      auto jb = links_run(cfg, seed + 1, b);
      const json tv = (a.empty() || b.empty()) ? json(nullptr) : json(stats::tv_empirical(a, b, 64));
      sup.push_back({{"K", K}, {"runs", {ja, jb}}, {"trace_tv", tv}});
      ns << " K=" << K << ": " << ja["attachment_violations"].get<std::int64_t>() << "/"
         << ja["breaks"].get<std::int64_t>();
    }
    r.detail["supplementary"] = sup;
    r.note += ns.str();
  }
}

// --------------------------------------------------------------- harris (9)

void criterion9(CriterionResult& r, std::uint64_t seed) {
  const auto dec = harris::check_decomposition(1000);
  const bool dec_ok = dec.max_error <= 1e-12 && dec.min_slack >= 0.0 && dec.min_residual >= 0.0;

  const auto spec = harris::ChainSpec::split();
  const std::int64_t m = 1000000;
  const auto split = harris::sample_endpoints(spec, seed, 0.3, 1, m, 0, true);
  const auto direct = harris::sample_endpoints(spec, seed, 0.3, 1, m, static_cast<std::uint32_t>(m), false);
  const double ks = stats::ks_statistic(split, direct);
  const bool ks_ok = ks < 0.005;

  harris::TvConfig tc;
  tc.seed = seed;
  tc.steps = {5, 20, 100};
  const auto common = harris::tv_convergence_check(tc);
  tc.coupling = harris::ReplicaCoupling::kIndependent;
  const auto independent = harris::tv_convergence_check(tc);
  const bool tv_ok = common.max_tv.back() < 0.01;

  bool same = true;
  json scans = json::array();
  for (std::uint64_t k = 0; k < 3; ++k) {
    for (const auto& chain : {harris::ChainSpec::split(), harris::ChainSpec::lindley()}) {
      const core::DrivingStream s(seed + k, core::UniformLaw{});
      const auto native = harris::regeneration_scan(chain, s, 100000, 2.0);
      const auto generic = harris::generic_success_times(chain, s, 100000, 2.0);
      same = same && native.success_times == generic;
      scans.push_back({{"chain", harris::to_string(chain.kind)},
                       {"seed", seed + k},
                       {"successes", native.success_times.size()},
                       {"identical", native.success_times == generic}});
    }
  }
  r.detail = {{"decomposition",
               {{"points", dec.points}, {"max_error", dec.max_error}, {"min_slack", dec.min_slack}, {"ok", dec_ok}}},
              {"one_step_ks", {{"samples", m}, {"statistic", ks}, {"ok", ks_ok}}},
              {"tv_common", common.to_json()},
              {"tv_independent", independent.to_json()},
              {"tv_ok", tv_ok},
              {"scans", scans},
              {"scans_identical", same}};
  r.pass = dec_ok && ks_ok && tv_ok && same;
  std::ostringstream os;
  os << std::setprecision(3) << "decomposition error " << dec.max_error << ", KS " << ks << ", TV(n=100) "
     << common.max_tv.back() << " common draws (independent " << independent.max_tv.back() << ", floor "
     << independent.noise_floor << "), scans " << (same ? "identical" : "DIFFER");
  r.note = os.str();
}

// ---------------------------------------------------------- calibration (10)

void criterion10(CriterionResult& r, std::uint64_t seed) {
  const auto results = stats::calibrate_all(1000, seed, 0.05);
  json list = json::array();
  bool ok = !results.empty();
  std::ostringstream os;
  os << std::setprecision(3);
  for (const auto& c : results) {
    list.push_back(c.to_json());
    ok = ok && c.pass();
    os << c.test << " " << c.rejection_rate << "; ";
  }
  r.detail = {{"results", list}};
  r.pass = ok;
  r.note = os.str() + "nominal 0.05 +- 0.02";
}

}  // namespace

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << (pass ? "[PASS] " : "[FAIL] ") << id << " " << title << " (" << std::fixed << std::setprecision(1)
     << seconds << " s): " << note;
  return os.str();
}

nlohmann::json CriterionResult::to_json() const {
  return {{"id", id},           {"title", title},   {"pass", pass}, {"seconds", seconds},
          {"budget_seconds", budget_seconds}, {"note", note}, {"detail", detail}};
}

const std::vector<int>& all_criteria() {
  static const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return ids;
}

std::string criterion_title(int id) { return spec_of(id).title; }

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  const auto& spec = spec_of(id);
  CriterionResult r;
  r.id = id;
  r.title = spec.title;
  r.budget_seconds = spec.budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: criterion1(r); break;
      case 2: criterion2(r); break;
      case 3: criterion3(r, opts.seed); break;
      case 4: criterion4(r, opts.seed); break;
      case 5: criterion5(r, opts.seed); break;
      case 6: criterion6(r, opts); break;
      case 7: criterion7(r, opts.seed); break;
      case 8: criterion8(r, opts); break;
      case 9: criterion9(r, opts.seed); break;
      case 10: criterion10(r, opts.seed); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.note = std::string("error: ") + e.what();
    r.detail["error"] = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > r.budget_seconds) {
    r.pass = false;
    r.note += " [over the runtime budget]";
  }
  r.detail["within_budget"] = r.seconds <= r.budget_seconds;
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id : opts.criteria.empty() ? all_criteria() : opts.criteria) out.push_back(run_criterion(id, opts));
  return out;
}

nlohmann::json acceptance_summary(const std::vector<CriterionResult>& results) {
  nlohmann::json list = nlohmann::json::array();
  int passed = 0;
  for (const auto& r : results) {
    list.push_back(r.to_json());
    passed += r.pass;
  }
  return {{"criteria", list}, {"passed", passed}, {"total", results.size()}};
}

}  // namespace regenlab::acceptance
