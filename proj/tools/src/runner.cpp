#include "regenlab/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "regenlab/acceptance/acceptance.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/core/parallel.hpp"
#include "regenlab/oracle/conditions.hpp"
#include "regenlab/oracle/exact.hpp"
#include "regenlab/regen/cycle_suite.hpp"
#include "regenlab/stats/estimators.hpp"
#include "regenlab/stats/tests.hpp"
#include "regenlab/walk/walk.hpp"

#ifndef REGENLAB_VERSION
#define REGENLAB_VERSION "0.0.0"
#endif
#ifndef REGENLAB_INSTALLED_PRESET_DIR
#define REGENLAB_INSTALLED_PRESET_DIR ""
#endif
#ifndef REGENLAB_SOURCE_PRESET_DIR
#define REGENLAB_SOURCE_PRESET_DIR ""
#endif

namespace regenlab::cli {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// Everything one seed contributes: a summary block, files and a verdict.
struct SeedRun {
  json summary = json::object();
  std::vector<OutputFile> files;
  bool pass = true;
  bool acceptance_failed = false;
  std::vector<std::string> report;
};

bool wants(const ExperimentConfig& cfg, const std::string& suite) {
  const auto& s = cfg.verification.suites;
  return std::find(s.begin(), s.end(), suite) != s.end();
}

void unsupported_suite(const ExperimentConfig& cfg, const std::vector<std::string>& allowed) {
  for (const auto& s : cfg.verification.suites)
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end())
      throw ConfigError("suite '" + s + "' is not available for process '" + process_name(cfg.process) + "'");
}

void add_cycles(const ExperimentConfig& cfg, SeedRun& run, std::uint64_t seed, const std::vector<regen::Cycle>& c) {
  if (cfg.output.cycles) run.files.push_back({"cycles-" + std::to_string(seed) + ".csv", regen::cycles_csv(c)});
}

void cycle_suite_check(const ExperimentConfig& cfg, SeedRun& run, std::uint64_t seed,
                       const std::vector<regen::Cycle>& cycles) {
  if (!wants(cfg, "cycle_suite")) return;
  regen::CycleSuiteConfig sc;
  sc.alpha = cfg.verification.alpha;
  sc.permutations = cfg.verification.permutations;
  sc.seed = seed;
  const auto rep = regen::cycle_suite(cycles, sc);
  run.summary["cycle_suite"] = rep.to_json();
  const bool ok = rep.tests_pass && rep.tail_pass();
  run.pass = run.pass && ok;
  std::ostringstream os;
  os << "seed " << seed << ": cycle suite " << (ok ? "pass" : "FAIL") << " over " << rep.cycles << " cycles";
  if (!rep.diagnostic.empty()) os << " (" << rep.diagnostic << ")";
  run.report.push_back(os.str());
}

std::vector<double> increments_of(const std::vector<regen::Cycle>& cycles) {
  std::vector<double> inc;
  inc.reserve(cycles.size());
  for (const auto& c : cycles) inc.push_back(c.trace.empty() ? 0.0 : c.trace.back());
  return inc;
}

void speed_from_cycles(SeedRun& run, std::uint64_t seed, const std::vector<regen::Cycle>& cycles) {
  std::vector<double> gaps;
  for (const auto& c : cycles) gaps.push_back(static_cast<double>(c.gap()));
  if (gaps.size() < 2) {
    run.summary["speed"] = {{"diagnostic", "fewer than two cycles"}};
    run.pass = false;
    return;
  }
  const auto inc = increments_of(cycles);
  const auto est = stats::renewal_reward(gaps, inc);
  run.summary["speed"] = est.to_json();
  std::ostringstream os;
  os << "seed " << seed << ": speed " << est.rate << " [" << est.lo << ", " << est.hi << "]";
  run.report.push_back(os.str());
}

// Cycles whose trace is replaced by the flattened per-step display rows.
template <class T>
std::vector<regen::Cycle> with_display(std::vector<regen::Cycle> cycles, const std::vector<std::vector<T>>& rows) {
  for (std::size_t k = 0; k < cycles.size() && k < rows.size(); ++k)
    cycles[k].trace.assign(rows[k].begin(), rows[k].end());
  return cycles;
}

SeedRun run_walk(const ExperimentConfig& cfg, const WalkParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite", "speed"});
  SeedRun run;
  walk::WalkConfig wc{p.law, cfg.scanner.N};
  wc.validate();
  const core::DrivingStream stream(seed, p.law);
  const auto h = p.past == "strict_record" ? walk::strict_record() : regen::PastEventSpec::always();
  const auto f = p.future == "weak"     ? walk::future_event(walk::Inequality::kWeak)
                 : p.future == "strict" ? walk::future_event(walk::Inequality::kStrict)
                                        : walk::next_zero_event();
  walk::WalkAdapter adapter;
  const auto scan = regen::scan_break_times(adapter, stream, h, f, cfg.scanner.break_config());
  run.summary["scan"] = scan.summary();
  run.summary["occurrence_density"] = walk::occurrence_density(scan, cfg.scanner.N);
  add_cycles(cfg, run, seed, scan.cycles);
  cycle_suite_check(cfg, run, seed, scan.cycles);
  if (wants(cfg, "speed")) speed_from_cycles(run, seed, scan.cycles);
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(scan.taus.size()) + " break times");
  return run;
}

void contact_outputs(const ExperimentConfig& cfg, SeedRun& run, std::uint64_t seed, const contact::ContactScan& cs) {
  run.summary["scan"] = cs.scan.summary();
  run.summary["probes"] = cs.probes;
  run.summary["overlong_gaps"] = cs.overlong_gaps;
  add_cycles(cfg, run, seed, cs.scan.cycles);
  std::ostringstream inc;
  inc << "k,gap,increment\n";
  for (std::size_t k = 0; k < cs.scan.cycles.size() && k < cs.increments.size(); ++k)
    inc << k << ',' << cs.scan.cycles[k].gap() << ',' << format_double(cs.increments[k]) << '\n';
  run.files.push_back({"increments-" + std::to_string(seed) + ".csv", inc.str()});
  cycle_suite_check(cfg, run, seed, cs.scan.cycles);
  if (wants(cfg, "speed")) {
    if (cs.scan.cycles.size() < 2) {
      run.summary["speed"] = {{"diagnostic", "fewer than two cycles"}};
      run.pass = false;
    } else {
      const auto sc = contact::speed_and_clt(cs.scan.cycles);
      run.summary["speed"] = sc.to_json();
      std::ostringstream os;
      os << "seed " << seed << ": speed " << sc.speed.rate << " [" << sc.speed.lo << ", " << sc.speed.hi
         << "], sigma^2 " << sc.sigma2;
      run.report.push_back(os.str());
    }
  }
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(cs.scan.taus.size()) +
                       " break times");
}

std::vector<std::int64_t> survival_horizons(std::int64_t T) {
  std::vector<std::int64_t> h;
  for (std::int64_t t : {T / 8, T / 4, T / 2, T})
    if (t > 0 && (h.empty() || t > h.back())) h.push_back(t);
  return h;
}

void survival_check(const ExperimentConfig& cfg, SeedRun& run, std::uint64_t seed,
                    const contact::SurvivalEstimate& s) {
  run.summary["survival"] = s.to_json();
  const bool ok = s.supercritical();
  run.pass = run.pass && ok;
  std::ostringstream os;
  os << "seed " << seed << ": survival " << s.p_hat << " +- " << s.std_error << " at T = "
     << cfg.scanner.horizon << (ok ? "" : " (not supercritical)");
  run.report.push_back(os.str());
}

constexpr std::int64_t kSurvivalSamples = 2000;

SeedRun run_contact2(const ExperimentConfig& cfg, const Contact2Params& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite", "speed", "survival"});
  SeedRun run;
  const contact::ContactDriving d(seed, p.law);
  if (wants(cfg, "survival"))
    survival_check(cfg, run, seed,
                   contact::estimate_survival2(d.shift(cfg.scanner.N + cfg.scanner.horizon + 1),
                                               survival_horizons(cfg.scanner.horizon), kSurvivalSamples));
  contact_outputs(cfg, run, seed, contact::kuczek_scan(d, cfg.scanner.N, cfg.scanner.horizon));
  return run;
}

SeedRun run_contact3(const ExperimentConfig& cfg, const Contact3Params& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite", "speed", "survival"});
  SeedRun run;
  const contact::ContactDriving d(seed, p.law, p.q);
  if (wants(cfg, "survival"))
    survival_check(cfg, run, seed,
                   contact::estimate_survival3(d.shift(cfg.scanner.N + cfg.scanner.horizon + 1),
                                               survival_horizons(cfg.scanner.horizon), kSurvivalSamples));
  const auto cs = contact::record_scan3(d, cfg.scanner.N, cfg.scanner.horizon, p.window);
  contact_outputs(cfg, run, seed, cs);
  run.summary["window_truncations"] = cs.window_truncations;
  return run;
}

void bins_summary(SeedRun& run, const bins::BinsScan& b) {
  run.summary["scan"] = b.scan.summary();
  run.summary["depth"] = b.depth;
  run.summary["h_count"] = b.h_count;
  run.summary["h_violations"] = b.h_violations;
  run.summary["min_gap"] = b.min_gap;
  if (b.h_violations > 0) run.pass = false;
}

SeedRun run_bins_basic(const ExperimentConfig& cfg, const BinsBasicParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite"});
  SeedRun run;
  const core::DrivingStream stream(seed, p.law);
  bins::BasicConfig bc;
  bc.depth = p.depth;
  bc.breaks = cfg.scanner.break_config();
  bc.initial = bins::BinState::from_counts(p.initial);
  const auto b = bins::scan_bins_basic(stream, bc);
  bins_summary(run, b);
  add_cycles(cfg, run, seed, with_display(b.scan.cycles, b.display));
  cycle_suite_check(cfg, run, seed, b.scan.cycles);
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(b.scan.taus.size()) +
                       " break times, min gap " + std::to_string(b.min_gap));
  return run;
}

SeedRun run_bins_prime(const ExperimentConfig& cfg, const BinsPrimeParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite"});
  SeedRun run;
  const core::DrivingStream stream(seed, core::Alphabet({static_cast<core::Symbol>(p.i1),
                                                         static_cast<core::Symbol>(p.i2)},
                                                        p.weights));
  bins::PrimeConfig pc;
  pc.i1 = p.i1;
  pc.i2 = p.i2;
  pc.depth = p.depth;
  pc.max_word_length = p.max_word_length;
  pc.breaks = cfg.scanner.break_config();
  pc.initial = bins::BinState::from_counts(p.initial);
  const auto ps = bins::scan_bins_prime(stream, pc);
  bins_summary(run, ps.bins);
  run.summary["word"] = ps.word.to_json();
  run.summary["r"] = ps.r;
  run.summary["exclusion"] = ps.exclusion;
  run.summary["min_gap_ok"] = ps.min_gap_ok;
  if (!ps.min_gap_ok && ps.bins.scan.cycles.size() > 0) run.pass = false;
  add_cycles(cfg, run, seed, with_display(ps.bins.scan.cycles, ps.bins.display));
  cycle_suite_check(cfg, run, seed, ps.bins.scan.cycles);
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(ps.bins.scan.taus.size()) +
                       " break times, min gap " + std::to_string(ps.bins.min_gap));
  return run;
}

SeedRun run_links(const ExperimentConfig& cfg, const LinksParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite"});
  SeedRun run;
  bins::LinksConfig lc;
  lc.p = p.p;
  lc.mean_length = p.mean_length;
  lc.epsilon = p.epsilon;
  lc.blocks = p.blocks;
  lc.horizon = cfg.scanner.horizon;
  lc.steps = cfg.scanner.N;
  lc.depth = p.depth;
  lc.calibration_steps = p.calibration_steps;
  const bins::LinkDriving d(seed, p.p, p.mean_length);
  const auto ls = bins::scan_links(d, lc);
  run.summary = ls.summary();
  if (ls.attachment_violations > 0) run.pass = false;
  add_cycles(cfg, run, seed, with_display(ls.scan.cycles, ls.traces));
  cycle_suite_check(cfg, run, seed, ls.scan.cycles);
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(ls.scan.taus.size()) +
                       " break times, " + std::to_string(ls.f1_count) + " F1 times, " +
                       std::to_string(ls.attachment_violations) + " attachment violations");
  return run;
}

SeedRun run_harris(const ExperimentConfig& cfg, const HarrisParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {"cycle_suite"});
  SeedRun run;
  const core::DrivingStream stream(seed, core::UniformLaw{});
  const auto hs = harris::regeneration_scan(p.chain, stream, cfg.scanner.N, p.x0);
  run.summary["chain"] = p.chain.to_json();
  run.summary["scan"] = hs.summary();
  add_cycles(cfg, run, seed, hs.cycles);
  cycle_suite_check(cfg, run, seed, hs.cycles);
  if (p.tv) {
    harris::TvConfig tc;
    tc.spec = p.chain;
    tc.inits = p.tv_inits;
    tc.steps = p.tv_steps;
    tc.replicas = p.tv_replicas;
    tc.bins = p.tv_bins;
    tc.coupling = p.tv_coupling;
    tc.seed = seed;
    const auto tv = harris::tv_convergence_check(tc);
    run.summary["tv"] = tv.to_json();
    std::ostringstream csv;
    csv << "steps,init_a,init_b,tv\n";
    for (std::size_t s = 0; s < tv.steps.size(); ++s)
      for (std::size_t i = 0; i < tv.inits.size(); ++i)
        for (std::size_t j = i + 1; j < tv.inits.size(); ++j)
          csv << tv.steps[s] << ',' << format_double(tv.inits[i]) << ',' << format_double(tv.inits[j]) << ','
              << format_double(tv.tv[s][i][j]) << '\n';
    run.files.push_back({"tv-" + std::to_string(seed) + ".csv", csv.str()});
    std::ostringstream os;
    os << "seed " << seed << ": max TV";
    for (std::size_t s = 0; s < tv.steps.size(); ++s) os << " n=" << tv.steps[s] << ":" << tv.max_tv[s];
    run.report.push_back(os.str());
  }
  run.report.push_back("seed " + std::to_string(seed) + ": " + std::to_string(hs.success_times.size()) +
                       " regeneration times");
  return run;
}

SeedRun run_acceptance_process(const ExperimentConfig& cfg, const AcceptanceParams& p, std::uint64_t seed) {
  unsupported_suite(cfg, {});
  SeedRun run;
  acceptance::AcceptanceOptions opts;
  opts.criteria = p.criteria;
  opts.seed = seed;
  opts.supplementary = p.supplementary;
  const auto results = acceptance::run_acceptance(opts);
  auto summary = acceptance::acceptance_summary(results);
  // Wall-clock times vary between runs and stay out of the files.
  const std::function<void(json&)> strip = [&](json& j) {
    if (j.is_object()) {
      j.erase("seconds");
      j.erase("total_seconds");
    }
    if (j.is_structured())
      for (auto& v : j) strip(v);
  };
  strip(summary);
  run.summary = summary;
  for (const auto& r : results) {
    run.report.push_back(r.line());
    if (!r.pass) run.acceptance_failed = true;
  }
  return run;
}

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::visit(
      [&](const auto& p) -> SeedRun {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, WalkParams>) return run_walk(cfg, p, seed);
        else if constexpr (std::is_same_v<P, Contact2Params>) return run_contact2(cfg, p, seed);
        else if constexpr (std::is_same_v<P, Contact3Params>) return run_contact3(cfg, p, seed);
        else if constexpr (std::is_same_v<P, BinsBasicParams>) return run_bins_basic(cfg, p, seed);
        else if constexpr (std::is_same_v<P, BinsPrimeParams>) return run_bins_prime(cfg, p, seed);
        else if constexpr (std::is_same_v<P, LinksParams>) return run_links(cfg, p, seed);
        else if constexpr (std::is_same_v<P, HarrisParams>) return run_harris(cfg, p, seed);
        else return run_acceptance_process(cfg, p, seed);
      },
      cfg.process);
}

// ---------------------------------------------------------------- oracle

regen::FutureEventSpec truncated(const regen::FutureEventSpec& f, std::int64_t lookahead) {
  return regen::FutureEventSpec(
      f.name(), [f](const core::DrivingStream& s, std::int64_t n) { return f.stepper(s, n); }, lookahead);
}

regen::FutureEventSpec simulated_future(const OracleSection& o) {
  if (o.future == "walk_weak") return truncated(walk::future_event(walk::Inequality::kWeak), o.lookahead);
  if (o.future == "walk_strict") return truncated(walk::future_event(walk::Inequality::kStrict), o.lookahead);
  if (o.future == "walk_next_zero") return truncated(walk::next_zero_event(), o.lookahead);
  if (o.future == "bins") return truncated(bins::ladder_future(1), o.lookahead);
  if (o.future == "always") return regen::FutureEventSpec::always();
  throw ConfigError("no simulation counterpart for future event '" + o.future + "'");
}

regen::PastEventSpec simulated_past(const OracleSection& o) {
  if (o.past == "always") return regen::PastEventSpec::always();
  if (o.past == "strict_record") return walk::strict_record();
  if (o.past == "run_of_ones") {
    if (o.past_k < 1) throw ConfigError("run_of_ones needs past_k >= 1 for the cross-check");
    return bins::ones_run(o.past_k - 1);
  }
  throw ConfigError("no simulation counterpart for past event '" + o.past + "'");
}

json cross_check(const OracleSection& o, const oracle::RationalAlphabet& alphabet, const oracle::ExactLaw& law,
                 std::uint64_t seed) {
  std::vector<core::Symbol> symbols;
  std::vector<double> weights;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    symbols.push_back(alphabet.symbols()[i]);
    weights.push_back(alphabet.weights()[i].get_d());
  }
  const core::DrivingStream stream(seed, core::Alphabet(symbols, weights));
  regen::BreakConfig bc;
  bc.horizon = o.lookahead;
  bc.min_separation = o.min_separation;
  bc.max_time = o.cross_check_N;
  bc.store_segments = false;
  walk::WalkAdapter adapter;
  const auto scan = regen::scan_break_times(adapter, stream, simulated_past(o), simulated_future(o), bc);

  // The exact gap law is only complete for gaps that fit after tau_0 = n_ref
  // inside 0..T, so both sides are conditioned on gap <= T - n_ref.
  json j{{"N", o.cross_check_N}, {"cycles", scan.cycles.size()}};
  if (law.n_ref < 0) {
    j["diagnostic"] = "no break time in 0..T under the exact law";
    j["pass"] = false;
    return j;
  }
  const std::int64_t max_gap = law.T - law.n_ref;
  j["max_gap"] = max_gap;
  std::vector<std::int64_t> gaps;
  std::vector<double> probs;
  oracle::Rational mass = 0;
  const auto exact = law.gap_given_ref();
  for (const auto& [n, m] : exact)
    if (n >= 1 && n <= max_gap) mass += m;
  for (const auto& [n, m] : exact)
    if (n >= 1 && n <= max_gap && m > 0) {
      gaps.push_back(n);
      probs.push_back(oracle::Rational(m / mass).get_d());
    }
  std::vector<double> counts(gaps.size(), 0.0);
  std::int64_t inside = 0, outside_support = 0;
  for (const auto& c : scan.cycles) {
    if (c.gap() > max_gap) continue;
    ++inside;
    const auto it = std::find(gaps.begin(), gaps.end(), c.gap());
    if (it == gaps.end()) ++outside_support;
    else counts[static_cast<std::size_t>(it - gaps.begin())] += 1.0;
  }
  j["cycles_in_range"] = inside;
  j["gaps_outside_exact_support"] = outside_support;
  if (gaps.empty() || inside == 0) {
    j["diagnostic"] = "no gaps in range to compare";
    j["pass"] = false;
    return j;
  }
  json table = json::array();
  for (std::size_t i = 0; i < gaps.size(); ++i)
    table.push_back({{"gap", gaps[i]}, {"exact", probs[i]}, {"simulated", counts[i] / static_cast<double>(inside)}});
  j["table"] = table;
  double cdf_exact = 0.0, cdf_sim = 0.0, ks = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    cdf_exact += probs[i];
    cdf_sim += counts[i] / static_cast<double>(inside);
    ks = std::max(ks, std::abs(cdf_exact - cdf_sim));
  }
  j["ks_distance"] = ks;
  if (gaps.size() == 1) {
    j["pass"] = outside_support == 0;
    return j;
  }
  const auto chi = stats::chi_square_gof(counts, probs, 0.01);
  j["chi_square"] = chi.to_json();
  j["pass"] = !chi.reject && outside_support == 0;
  return j;
}

std::string to_hex(const unsigned char* p, std::size_t n) {
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(p[i]);
  return os.str();
}

}  // namespace

std::string tool_version() { return REGENLAB_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  return to_hex(md, len);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult out;
  const auto canonical = cfg.canonical();
  json runs = json::array();
  // Seeds run concurrently; results are merged in seed-list order.
  std::vector<SeedRun> done(cfg.seeds.size());
  std::vector<std::exception_ptr> failures(cfg.seeds.size());
  core::parallel_for(cfg.seeds.size(), [&](std::size_t i) {
    try {
      done[i] = run_seed(cfg, cfg.seeds[i]);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const auto seed = cfg.seeds[i];
    auto& run = done[i];
    run.summary["seed"] = seed;
    run.summary["verification_pass"] = run.pass;
    runs.push_back(std::move(run.summary));
    for (auto& f : run.files) out.files.push_back(std::move(f));
    for (auto& l : run.report) out.report.push_back(std::move(l));
    out.verification_pass = out.verification_pass && run.pass;
    out.acceptance_failed = out.acceptance_failed || run.acceptance_failed;
  }
  out.summary = {{"tool", "regen-lab"},
                 {"version", tool_version()},
                 {"name", cfg.name},
                 {"process", process_name(cfg.process)},
                 {"config_sha256", sha256_hex(canonical.dump())},
                 {"runs", runs},
                 {"verification_pass", out.verification_pass}};
  if (cfg.oracle) out.summary["oracle"] = run_oracle(*cfg.oracle, cfg.seeds.front());
  return out;
}

std::filesystem::path write_outputs(const ExperimentConfig& cfg, const RunResult& result,
                                    const std::filesystem::path& dir) {
  std::filesystem::path out = dir;
  if (out.empty()) out = cfg.output.dir.empty() ? std::filesystem::path("regenlab-out") / cfg.name : std::filesystem::path(cfg.output.dir);
  std::filesystem::create_directories(out);
  std::vector<OutputFile> files = result.files;
  files.push_back({"summary.json", result.summary.dump(2) + "\n"});
  const auto canonical = cfg.canonical();
  json listing = json::array();
  for (const auto& f : files) {
    std::ofstream os(out / f.name, std::ios::binary);
    os << f.contents;
    if (!os) throw std::runtime_error("cannot write " + (out / f.name).string());
    listing.push_back({{"name", f.name}, {"bytes", f.contents.size()}, {"sha256", sha256_hex(f.contents)}});
  }
  const json manifest{{"tool", "regen-lab"},
                      {"version", tool_version()},
                      {"schema_version", kSchemaVersion},
                      {"config_sha256", sha256_hex(canonical.dump())},
                      {"config", canonical},
                      {"seeds", cfg.seeds},
                      {"files", listing}};
  std::ofstream os(out / "manifest.json", std::ios::binary);
  os << manifest.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write " + (out / "manifest.json").string());
  return out;
}

nlohmann::json run_oracle(const OracleSection& o, std::uint64_t seed) {
  const auto alphabet = oracle::RationalAlphabet::from_json(o.alphabet);
  const auto h = oracle::past_by_name(o.past, o.past_k);
  const auto f = oracle::future_by_name(o.future, o.lookahead);
  oracle::EnumerationConfig ec;
  ec.T = o.T;
  ec.min_separation = o.min_separation;
  const auto law = oracle::enumerate_exact(alphabet, h, f, ec);
  const auto iid = oracle::verify_iid_segments_exact(law);
  const auto mono = oracle::check_monotonicity(alphabet, f, o.max_m, o.min_separation);
  json j{{"past", h.name},
         {"future", f.name},
         {"law", law.to_json()},
         {"iid", iid.to_json()},
         {"monotonicity", mono.to_json()}};
  bool pass = iid.pass && mono.pass;
  if (!h.trivial()) {
    const auto restr = oracle::check_restriction_conditions(alphabet, h, f, o.max_m, 2, o.min_separation);
    j["restrictions"] = restr.to_json();
    pass = pass && restr.pass;
  }
  j["pass"] = pass;
  json given_ref = json::object();
  for (const auto& [n, m] : law.gap_given_ref()) given_ref[std::to_string(n)] = oracle::to_string(m);
  j["gap_given_ref"] = given_ref;
  j["n_ref"] = law.n_ref;
  if (o.witness) {
    const auto [gap, symbol] = *o.witness;
    const auto w = law.next_symbol_given_gap(gap, symbol);
    j["witness"] = {{"gap", gap}, {"symbol", symbol}};
    if (w) {
      j["witness"]["probability"] = oracle::to_string(*w);
      j["witness"]["symbol_probability"] = oracle::to_string(alphabet.probability_of(symbol));
    } else {
      j["witness"]["probability"] = nullptr;
    }
  }
  if (o.cross_check_N > 0) j["cross_check"] = cross_check(o, alphabet, law, seed);
  return j;
}

std::vector<PresetInfo> list_presets(const std::filesystem::path& dir) {
  std::vector<PresetInfo> out;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("preset directory " + dir.string() + " not found");
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    PresetInfo info;
    info.file = e.path().filename().string();
    try {
      const auto cfg = load_config(e.path());
      info.name = cfg.name;
      info.process = process_name(cfg.process);
      info.description = cfg.description;
    } catch (const ConfigError& err) {
      info.description = std::string("invalid: ") + err.what();
    }
    out.push_back(std::move(info));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  return out;
}

std::filesystem::path default_preset_dir() {
  if (const char* env = std::getenv("REGENLAB_PRESET_DIR"); env != nullptr && *env != '\0') return env;
  for (const char* p : {REGENLAB_INSTALLED_PRESET_DIR, REGENLAB_SOURCE_PRESET_DIR})
    if (*p != '\0' && std::filesystem::is_directory(p)) return p;
  return "presets";
}

}  // namespace regenlab::cli
