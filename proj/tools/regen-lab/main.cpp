#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regenlab/cli/config.hpp"
#include "regenlab/cli/runner.hpp"
#include "regenlab/errors.hpp"

namespace cli = regenlab::cli;

namespace {

enum ExitCode : int { kOk = 0, kRuntime = 1, kConfig = 2, kChecksFailed = 3 };

// Flags shared by the quick subcommands.
struct Common {
  std::string config;
  std::string seeds;
  std::string out;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> steps;
  std::vector<std::string> suites;
  bool json = false;
};

void add_common(CLI::App* app, Common& c, bool with_config = true) {
  if (with_config) app->add_option("--config", c.config, "Start from this configuration file")->check(CLI::ExistingFile);
  app->add_option("--seeds", c.seeds, "Seeds: a..b, a,b,c or a single integer");
  app->add_option("--out", c.out, "Write CSV, summary.json and manifest.json here");
  app->add_option("--horizon", c.horizon, "Future-event horizon T");
  app->add_option("--steps,-N", c.steps, "Scan length N");
  app->add_option("--verify", c.suites, "Verification suites (cycle_suite, speed, survival)");
  app->add_flag("--json", c.json, "Print summary.json to stdout");
}

cli::ExperimentConfig base_config(const Common& c, const std::string& name) {
  cli::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = cli::load_config(c.config);
  else cfg.name = name;
  if (!c.seeds.empty()) cfg.seeds = cli::parse_seed_list(c.seeds);
  if (c.horizon) cfg.scanner.horizon = *c.horizon;
  if (c.steps) cfg.scanner.N = *c.steps;
  if (!c.suites.empty()) cfg.verification.suites = c.suites;
  // Round-trip through the parser so flag values get the same validation as
  // file values.
  return cli::parse_config(cfg.canonical());
}

template <class P>
P& params_of(cli::ExperimentConfig& cfg) {
  if (!std::holds_alternative<P>(cfg.process)) cfg.process = P{};
  return std::get<P>(cfg.process);
}

int execute(const cli::ExperimentConfig& raw, const Common& c, bool always_write) {
  const auto cfg = cli::parse_config(raw.canonical());
  const auto result = cli::run_experiment(cfg);
  for (const auto& line : result.report) std::cout << line << "\n";
  if (always_write || !c.out.empty()) {
    const auto dir = cli::write_outputs(cfg, result, c.out);
    std::cout << "wrote " << dir.string() << "\n";
  }
  if (c.json) std::cout << result.summary.dump(2) << "\n";
  if (result.summary.contains("oracle")) {
    const auto& o = result.summary["oracle"];
    std::cout << "oracle: exact checks " << (o.value("pass", false) ? "pass" : "fail");
    if (o.contains("cross_check")) std::cout << ", cross-check " << (o["cross_check"].value("pass", false) ? "pass" : "fail");
    std::cout << "\n";
  }
  if (result.acceptance_failed || !result.verification_pass) return kChecksFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regen-lab: regeneration-structure experiments"};
  app.set_version_flag("--version", cli::tool_version());
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (sets REGENLAB_THREADS)")->check(CLI::PositiveNumber);

  Common run_c;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  std::string run_config;
  run->add_option("config", run_config, "Configuration file")->required()->check(CLI::ExistingFile);
  add_common(run, run_c, false);

  std::string oracle_config;
  std::uint64_t oracle_seed = 1;
  std::optional<std::int64_t> oracle_n;
  auto* oracle = app.add_subcommand("oracle", "Exact enumeration from the oracle section of a configuration");
  oracle->add_option("config", oracle_config, "Configuration file with an oracle section")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--seed", oracle_seed, "Seed of the simulation cross-check");
  oracle->add_option("--cross-check", oracle_n, "Simulation length for the gap-law cross-check (0: off)");

  std::string preset_dir;
  auto* presets = app.add_subcommand("list-presets", "List bundled configurations");
  presets->add_option("--dir", preset_dir, "Preset directory");

  std::vector<std::string> validate_files;
  auto* validate = app.add_subcommand("validate", "Check configuration files against the schema");
  validate->add_option("files", validate_files, "Configuration files")->required();

  Common walk_c;
  std::string walk_law, walk_past, walk_future;
  auto* walk = app.add_subcommand("walk", "Random-walk break times");
  add_common(walk, walk_c);
  walk->add_option("--law", walk_law, "Increment law, e.g. walk:0.4:0.2");
  walk->add_option("--past", walk_past, "always or strict_record");
  walk->add_option("--future", walk_future, "weak, strict or weak_next_zero");

  Common c2_c;
  std::optional<double> c2_b;
  auto* contact2 = app.add_subcommand("contact2", "Two-state contact process (Kuczek regeneration)");
  add_common(contact2, c2_c);
  contact2->add_option("--b", c2_b, "Independent descendant probability");

  Common c3_c;
  std::optional<double> c3_b, c3_q;
  std::optional<std::int64_t> c3_window;
  auto* contact3 = app.add_subcommand("contact3", "Three-state contact process with immunisation");
  add_common(contact3, c3_c);
  contact3->add_option("--b", c3_b, "Independent descendant probability");
  contact3->add_option("--q", c3_q, "Probability that an immune site stays susceptible to reinfection");
  contact3->add_option("--window", c3_window, "Z_- window (0: automatic)");

  auto* bins = app.add_subcommand("bins", "Infinite-bin models");
  bins->require_subcommand(1);
  Common bb_c;
  std::string bb_law;
  std::optional<std::int64_t> bb_depth;
  auto* bins_basic = bins->add_subcommand("basic", "Basic infinite-bin model");
  add_common(bins_basic, bb_c);
  bins_basic->add_option("--xi-law", bb_law, "Law of the active particle number, e.g. geometric:0.5");
  bins_basic->add_option("--depth", bb_depth, "Number of bins below the top in the trace");

  Common bp_c;
  std::optional<std::int64_t> bp_i1, bp_i2, bp_depth;
  std::optional<std::vector<double>> bp_weights;
  auto* bins_prime = bins->add_subcommand("prime", "Bins driven by two mutually prime ranks");
  add_common(bins_prime, bp_c);
  bins_prime->add_option("--i1", bp_i1, "Smaller rank");
  bins_prime->add_option("--i2", bp_i2, "Larger rank");
  bins_prime->add_option("--weights", bp_weights, "Probabilities of i1 and i2")->expected(2);
  bins_prime->add_option("--depth", bp_depth, "Number of bins below the top in the trace");

  Common bl_c;
  std::optional<double> bl_p, bl_eps, bl_mean;
  std::optional<std::int64_t> bl_k, bl_depth;
  auto* bins_links = bins->add_subcommand("links", "Random-links model");
  add_common(bins_links, bl_c);
  bins_links->add_option("--p", bl_p, "Activity probability");
  bins_links->add_option("--eps", bl_eps, "Slack epsilon of the block offsets");
  bins_links->add_option("--mean-length", bl_mean, "Mean link length");
  bins_links->add_option("--K", bl_k, "Backward blocks in the past event");
  bins_links->add_option("--depth", bl_depth, "Coordinates below the top in the trace");

  Common h_c;
  std::string h_chain;
  std::optional<double> h_x0;
  std::optional<std::int64_t> h_replicas;
  std::optional<std::vector<double>> h_inits;
  std::optional<std::vector<std::int64_t>> h_tv_steps;
  bool h_no_tv = false;
  auto* harris = app.add_subcommand("harris", "Harris chain split regeneration and TV convergence");
  add_common(harris, h_c);
  harris->add_option("--chain", h_chain, "split or lindley");
  harris->add_option("--x0", h_x0, "Initial state of the regeneration scan");
  harris->add_option("--replicas", h_replicas, "Replicas per initial state for TV");
  harris->add_option("--inits", h_inits, "Initial states compared in TV");
  harris->add_option("--tv-steps", h_tv_steps, "Step counts at which TV is measured");
  harris->add_flag("--no-tv", h_no_tv, "Skip the TV convergence check");

  Common a_c;
  std::vector<int> a_criteria;
  bool a_no_supp = false;
  auto* acceptance = app.add_subcommand("acceptance", "Run the numbered acceptance criteria");
  add_common(acceptance, a_c);
  acceptance->add_option("criteria", a_criteria, "Criterion ids (default: all)")->check(CLI::Range(1, 10));
  acceptance->add_flag("--no-supplementary", a_no_supp, "Skip supplementary regimes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (threads) setenv("REGENLAB_THREADS", std::to_string(*threads).c_str(), 1);

  try {
    if (*run) {
      Common c = run_c;
      c.config = run_config;
      const auto cfg = base_config(c, "");
      return execute(cfg, c, true);
    }
    if (*oracle) {
      const auto cfg = cli::load_config(oracle_config);
      if (!cfg.oracle) throw regenlab::ConfigError(oracle_config + ": no oracle section");
      auto o = *cfg.oracle;
      if (oracle_n) o.cross_check_N = *oracle_n;
      const auto j = cli::run_oracle(o, oracle_seed);
      std::cout << j.dump(2) << "\n";
      bool ok = j.value("pass", false);
      if (j.contains("cross_check")) ok = ok && j["cross_check"].value("pass", false);
      return ok ? kOk : kChecksFailed;
    }
    if (*presets) {
      const auto dir = preset_dir.empty() ? cli::default_preset_dir() : std::filesystem::path(preset_dir);
      for (const auto& p : cli::list_presets(dir))
        std::cout << p.file << "\t" << p.process << "\t" << p.description << "\n";
      return kOk;
    }
    if (*validate) {
      int code = kOk;
      for (const auto& f : validate_files) {
        const auto errors = cli::validate_config_file(f);
        if (errors.empty()) {
          std::cout << f << ": ok\n";
          continue;
        }
        code = kConfig;
        for (const auto& e : errors) std::cerr << f << ": " << e << "\n";
      }
      return code;
    }
    if (*walk) {
      auto cfg = base_config(walk_c, "walk");
      auto& p = params_of<cli::WalkParams>(cfg);
      if (!walk_law.empty()) p.law = cli::parse_law_spec(walk_law);
      if (!walk_past.empty()) p.past = walk_past;
      if (!walk_future.empty()) p.future = walk_future;
      return execute(cfg, walk_c, false);
    }
    if (*contact2) {
      auto cfg = base_config(c2_c, "contact2");
      auto& p = params_of<cli::Contact2Params>(cfg);
      if (c2_b) p.law = regenlab::contact::DescendantLaw::independent(*c2_b);
      return execute(cfg, c2_c, false);
    }
    if (*contact3) {
      auto cfg = base_config(c3_c, "contact3");
      auto& p = params_of<cli::Contact3Params>(cfg);
      if (c3_b) p.law = regenlab::contact::DescendantLaw::independent(*c3_b);
      if (c3_q) p.q = *c3_q;
      if (c3_window) p.window = *c3_window;
      return execute(cfg, c3_c, false);
    }
    if (*bins_basic) {
      auto cfg = base_config(bb_c, "bins-basic");
      auto& p = params_of<cli::BinsBasicParams>(cfg);
      if (!bb_law.empty()) p.law = cli::parse_law_spec(bb_law);
      if (bb_depth) p.depth = *bb_depth;
      return execute(cfg, bb_c, false);
    }
    if (*bins_prime) {
      auto cfg = base_config(bp_c, "bins-prime");
      auto& p = params_of<cli::BinsPrimeParams>(cfg);
      if (bp_i1) p.i1 = *bp_i1;
      if (bp_i2) p.i2 = *bp_i2;
      if (bp_weights) p.weights = *bp_weights;
      if (bp_depth) p.depth = *bp_depth;
      return execute(cfg, bp_c, false);
    }
    if (*bins_links) {
      auto cfg = base_config(bl_c, "links");
      auto& p = params_of<cli::LinksParams>(cfg);
      if (bl_p) p.p = *bl_p;
      if (bl_eps) p.epsilon = *bl_eps;
      if (bl_mean) p.mean_length = *bl_mean;
      if (bl_k) p.blocks = *bl_k;
      if (bl_depth) p.depth = *bl_depth;
      return execute(cfg, bl_c, false);
    }
    if (*harris) {
      auto cfg = base_config(h_c, "harris");
      auto& p = params_of<cli::HarrisParams>(cfg);
      if (!h_chain.empty()) p.chain.kind = regenlab::harris::chain_kind_from_string(h_chain);
      if (h_x0) p.x0 = *h_x0;
      if (h_replicas) p.tv_replicas = *h_replicas;
      if (h_inits) p.tv_inits = *h_inits;
      if (h_tv_steps) p.tv_steps = *h_tv_steps;
      if (h_no_tv) p.tv = false;
      return execute(cfg, h_c, false);
    }
    if (*acceptance) {
      auto cfg = base_config(a_c, "acceptance");
      auto& p = params_of<cli::AcceptanceParams>(cfg);
      if (!a_criteria.empty()) p.criteria = a_criteria;
      if (a_no_supp) p.supplementary = false;
      if (a_c.seeds.empty() && a_c.config.empty()) cfg.seeds = {2026};
      return execute(cfg, a_c, false);
    }
  } catch (const regenlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
