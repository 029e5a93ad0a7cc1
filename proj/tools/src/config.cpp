#include "regenlab/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "regenlab/errors.hpp"
#include "regenlab/oracle/events.hpp"

namespace regenlab::cli {

namespace {

using nlohmann::json;

// Reads typed keys from one JSON object, remembering which keys were used so
// the leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) error("", "expected an object");
  }

  bool ok() const noexcept { return j_.is_object(); }
  bool has(const std::string& key) const { return ok() && j_.contains(key); }
  std::string path(const std::string& key) const { return path_ + "/" + key; }

  void error(const std::string& key, const std::string& msg) const {
    errors_.push_back((key.empty() ? path_ : path(key)) + (path_.empty() && key.empty() ? "/" : "") + ": " + msg);
  }

  const json* raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  template <class T>
  void get(const std::string& key, T& out, bool required = false) {
    const json* v = raw(key);
    if (v == nullptr) {
      if (required) error(key, "required key is missing");
      return;
    }
    if (!type_ok<T>(*v)) {
      error(key, std::string("expected ") + type_name<T>());
      return;
    }
    try {
      out = v->get<T>();
    } catch (const std::exception& e) {
      error(key, e.what());
    }
  }

  void finish() const {
    if (!ok()) return;
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) error(k, "unknown key");
  }

 private:
  template <class T>
  static bool type_ok(const json& v) {
    if constexpr (std::is_same_v<T, bool>) return v.is_boolean();
    else if constexpr (std::is_same_v<T, std::string>) return v.is_string();
    else if constexpr (std::is_unsigned_v<T>) return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    else if constexpr (std::is_integral_v<T>) return v.is_number_integer();
    else if constexpr (std::is_floating_point_v<T>) return v.is_number();
    else if constexpr (std::is_same_v<T, std::vector<double>>) {
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); });
    } else {
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); });
    }
  }

  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_unsigned_v<T>) return "a nonnegative integer";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::vector<double>>) return "an array of numbers";
    else if constexpr (std::is_same_v<T, std::vector<std::string>>) return "an array of strings";
    else return "an array of integers";
  }

  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void require(bool cond, Reader& r, const std::string& key, const std::string& msg) {
  if (!cond) r.error(key, msg);
}

template <class F>
void guarded(Reader& r, const std::string& key, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    r.error(key, e.what());
  }
}

void read_law(Reader& r, const std::string& key, core::Law& law) {
  if (const json* v = r.raw(key)) guarded(r, key, [&] { law = core::law_from_json(*v); });
}

void read_descendants(Reader& r, contact::DescendantLaw& law) {
  const json* b = r.raw("b");
  const json* d = r.raw("descendants");
  if (b && d) r.error("b", "give either 'b' or 'descendants', not both");
  if (b) {
    if (!b->is_number()) r.error("b", "expected a number");
    else guarded(r, "b", [&] { law = contact::DescendantLaw::independent(b->get<double>()); });
  }
  if (d) guarded(r, "descendants", [&] {
      law = contact::DescendantLaw::from_json(*d);
      law.validate();
    });
}

std::vector<std::int64_t> read_initial(Reader& r, std::vector<std::int64_t> fallback) {
  std::vector<std::int64_t> init = std::move(fallback);
  r.get("initial", init);
  guarded(r, "initial", [&] {
    if (!bins::BinState::from_counts(init).valid()) throw ConfigError("not a valid bin configuration");
  });
  return init;
}

ProcessParams read_process(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "/process", errors);
  std::string type;
  r.get("type", type, true);
  ProcessParams out = WalkParams{};
  if (type == "walk") {
    WalkParams p;
    read_law(r, "law", p.law);
    r.get("past", p.past);
    r.get("future", p.future);
    require(p.past == "always" || p.past == "strict_record", r, "past", "expected always or strict_record");
    require(p.future == "weak" || p.future == "strict" || p.future == "weak_next_zero", r, "future",
            "expected weak, strict or weak_next_zero");
    out = p;
  } else if (type == "contact2") {
    Contact2Params p;
    read_descendants(r, p.law);
    out = p;
  } else if (type == "contact3") {
    Contact3Params p;
    read_descendants(r, p.law);
    r.get("q", p.q);
    r.get("window", p.window);
    require(p.q >= 0.0 && p.q <= 1.0, r, "q", "must lie in [0,1]");
    require(p.window >= 0, r, "window", "must be nonnegative");
    out = p;
  } else if (type == "bins-basic") {
    BinsBasicParams p;
    read_law(r, "law", p.law);
    r.get("depth", p.depth);
    require(p.depth >= 0, r, "depth", "must be nonnegative");
    p.initial = read_initial(r, p.initial);
    out = p;
  } else if (type == "bins-prime") {
    BinsPrimeParams p;
    r.get("i1", p.i1);
    r.get("i2", p.i2);
    r.get("weights", p.weights);
    r.get("depth", p.depth);
    r.get("max_word_length", p.max_word_length);
    require(p.weights.size() == 2, r, "weights", "expected two weights (for i1 and i2)");
    require(p.depth >= 0, r, "depth", "must be nonnegative");
    p.initial = read_initial(r, p.initial);
    out = p;
  } else if (type == "links") {
    LinksParams p;
    r.get("p", p.p);
    r.get("mean_length", p.mean_length);
    r.get("epsilon", p.epsilon);
    r.get("blocks", p.blocks);
    r.get("depth", p.depth);
    r.get("calibration_steps", p.calibration_steps);
    require(p.p > 0.0 && p.p <= 1.0, r, "p", "must lie in (0,1]");
    require(p.mean_length > 0.0, r, "mean_length", "must be positive");
    require(p.epsilon > 0.0 && p.epsilon < 1.0, r, "epsilon", "must lie in (0,1)");
    require(p.blocks >= 1, r, "blocks", "must be at least 1");
    require(p.depth >= 0, r, "depth", "must be nonnegative");
    require(p.calibration_steps >= 1000, r, "calibration_steps", "must be at least 1000");
    out = p;
  } else if (type == "harris") {
    HarrisParams p;
    std::string chain = "split";
    r.get("chain", chain);
    guarded(r, "chain", [&] { p.chain.kind = harris::chain_kind_from_string(chain); });
    r.get("service_mean", p.chain.service_mean);
    r.get("arrival_mean", p.chain.arrival_mean);
    guarded(r, "chain", [&] { p.chain.validate(); });
    r.get("x0", p.x0);
    require(p.chain.in_state_space(p.x0), r, "x0", "outside the state space");
    if (const json* tv = r.raw("tv")) {
      if (tv->is_boolean()) {
        p.tv = tv->get<bool>();
      } else {
        Reader t(*tv, r.path("tv"), errors);
        if (t.ok()) {
          p.tv = true;
          t.get("inits", p.tv_inits);
          t.get("steps", p.tv_steps);
          t.get("replicas", p.tv_replicas);
          t.get("bins", p.tv_bins);
          std::string coupling = "common";
          t.get("coupling", coupling);
          if (coupling == "common") p.tv_coupling = harris::ReplicaCoupling::kCommon;
          else if (coupling == "independent") p.tv_coupling = harris::ReplicaCoupling::kIndependent;
          else t.error("coupling", "expected common or independent");
          require(p.tv_replicas >= 10000, t, "replicas", "must be at least 10^4");
          require(p.tv_bins >= 1, t, "bins", "must be positive");
          require(!p.tv_inits.empty(), t, "inits", "must not be empty");
          for (double x : p.tv_inits) require(p.chain.in_state_space(x), t, "inits", "outside the state space");
          for (auto n : p.tv_steps) require(n >= 0, t, "steps", "must be nonnegative");
          t.finish();
        }
      }
    }
    out = p;
  } else if (type == "acceptance") {
    AcceptanceParams p;
    r.get("criteria", p.criteria);
    r.get("supplementary", p.supplementary);
    for (int c : p.criteria) require(c >= 1 && c <= 10, r, "criteria", "criteria are numbered 1..10");
    out = p;
  } else if (!type.empty()) {
    std::string names;
    for (const auto& n : process_names()) names += (names.empty() ? "" : ", ") + n;
    r.error("type", "unknown process type '" + type + "' (expected one of " + names + ")");
  }
  r.finish();
  return out;
}

ScannerSection read_scanner(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "/scanner", errors);
  ScannerSection s;
  r.get("horizon", s.horizon);
  r.get("min_separation", s.min_separation);
  r.get("N", s.N);
  r.get("escalation_cap", s.escalation_cap);
  std::string policy = regen::to_string(s.policy);
  r.get("undecided_policy", policy);
  guarded(r, "undecided_policy", [&] { s.policy = regen::undecided_policy_from_string(policy); });
  guarded(r, "", [&] { s.break_config().validate(); });
  r.finish();
  return s;
}

VerificationSection read_verification(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "/verification", errors);
  VerificationSection v;
  r.get("suites", v.suites);
  r.get("alpha", v.alpha);
  r.get("permutations", v.permutations);
  for (const auto& s : v.suites)
    require(s == "cycle_suite" || s == "speed" || s == "survival", r, "suites",
            "unknown suite '" + s + "' (expected cycle_suite, speed or survival)");
  require(v.alpha > 0.0 && v.alpha < 1.0, r, "alpha", "must lie in (0,1)");
  require(v.permutations >= 99, r, "permutations", "must be at least 99");
  r.finish();
  return v;
}

OutputSection read_output(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "/output", errors);
  OutputSection o;
  r.get("dir", o.dir);
  r.get("cycles", o.cycles);
  r.finish();
  return o;
}

OracleSection read_oracle(const json& j, std::vector<std::string>& errors) {
  Reader r(j, "/oracle", errors);
  OracleSection o;
  if (const json* a = r.raw("alphabet")) {
    o.alphabet = *a;
    guarded(r, "alphabet", [&] { oracle::RationalAlphabet::from_json(*a); });
  } else {
    r.error("alphabet", "required key is missing");
  }
  r.get("past", o.past);
  r.get("past_k", o.past_k);
  r.get("future", o.future);
  r.get("lookahead", o.lookahead);
  r.get("T", o.T);
  r.get("min_separation", o.min_separation);
  r.get("max_m", o.max_m);
  r.get("cross_check_N", o.cross_check_N);
  guarded(r, "past", [&] { oracle::past_by_name(o.past, o.past_k); });
  guarded(r, "future", [&] { oracle::future_by_name(o.future, o.lookahead); });
  require(o.lookahead >= 1, r, "lookahead", "must be at least 1");
  require(o.T >= 1, r, "T", "must be at least 1");
  require(o.min_separation >= 1, r, "min_separation", "must be at least 1");
  require(o.max_m >= 1, r, "max_m", "must be at least 1");
  require(o.cross_check_N >= 0, r, "cross_check_N", "must be nonnegative");
  if (const json* w = r.raw("witness")) {
    Reader wr(*w, r.path("witness"), errors);
    int gap = 1, symbol = 0;
    wr.get("gap", gap, true);
    wr.get("symbol", symbol, true);
    wr.finish();
    o.witness = {gap, symbol};
  }
  r.finish();
  return o;
}

std::vector<std::uint64_t> read_seeds(const json* j, Reader& r) {
  std::vector<std::uint64_t> seeds;
  if (j == nullptr) {
    r.error("seeds", "required key is missing");
    return seeds;
  }
  if (j->is_array()) {
    for (const auto& v : *j) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        r.error("seeds", "seeds must be nonnegative integers");
        return {};
      }
      seeds.push_back(v.get<std::uint64_t>());
    }
  } else if (j->is_object()) {
    std::vector<std::string> errs;
    Reader s(*j, r.path("seeds"), errs);
    std::uint64_t from = 0, count = 0;
    s.get("from", from, true);
    s.get("count", count, true);
    s.finish();
    for (const auto& e : errs) r.error("seeds", e);
    if (count > 100000) r.error("seeds", "count must be at most 100000");
    else
      for (std::uint64_t k = 0; k < count; ++k) seeds.push_back(from + k);
  } else {
    r.error("seeds", "expected an array of integers or {\"from\": a, \"count\": n}");
  }
  if (seeds.empty() && (j->is_array() || j->is_object())) r.error("seeds", "at least one seed is required");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) r.error("seeds", "seeds must be distinct");
  return seeds;
}

json law_json(const core::Law& law) { return core::law_to_json(law); }

}  // namespace

std::string process_name(const ProcessParams& p) { return process_names()[p.index()]; }

const std::vector<std::string>& process_names() {
  static const std::vector<std::string> names{"walk",       "contact2", "contact3", "bins-basic",
                                              "bins-prime", "links",    "harris",   "acceptance"};
  return names;
}

regen::BreakConfig ScannerSection::break_config() const {
  regen::BreakConfig b;
  b.horizon = horizon;
  b.min_separation = min_separation;
  b.max_time = N;
  b.policy = policy;
  b.escalation_cap = escalation_cap;
  return b;
}

nlohmann::json ExperimentConfig::canonical() const {
  json proc = std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, WalkParams>) {
          return {{"law", law_json(p.law)}, {"past", p.past}, {"future", p.future}};
        } else if constexpr (std::is_same_v<P, Contact2Params>) {
          return {{"descendants", p.law.to_json()}};
        } else if constexpr (std::is_same_v<P, Contact3Params>) {
          return {{"descendants", p.law.to_json()}, {"q", p.q}, {"window", p.window}};
        } else if constexpr (std::is_same_v<P, BinsBasicParams>) {
          return {{"law", law_json(p.law)}, {"depth", p.depth}, {"initial", p.initial}};
        } else if constexpr (std::is_same_v<P, BinsPrimeParams>) {
          return {{"i1", p.i1},       {"i2", p.i2},
                  {"weights", p.weights}, {"depth", p.depth},
                  {"max_word_length", p.max_word_length}, {"initial", p.initial}};
        } else if constexpr (std::is_same_v<P, LinksParams>) {
          return {{"p", p.p},           {"mean_length", p.mean_length}, {"epsilon", p.epsilon},
                  {"blocks", p.blocks}, {"depth", p.depth},             {"calibration_steps", p.calibration_steps}};
        } else if constexpr (std::is_same_v<P, HarrisParams>) {
          json j{{"chain", harris::to_string(p.chain.kind)}, {"x0", p.x0}};
          if (p.chain.kind == harris::ChainKind::kLindley) {
            j["service_mean"] = p.chain.service_mean;
            j["arrival_mean"] = p.chain.arrival_mean;
          }
          if (p.tv) {
            j["tv"] = {{"inits", p.tv_inits},
                       {"steps", p.tv_steps},
                       {"replicas", p.tv_replicas},
                       {"bins", p.tv_bins},
                       {"coupling", p.tv_coupling == harris::ReplicaCoupling::kCommon ? "common" : "independent"}};
          } else {
            j["tv"] = false;
          }
          return j;
        } else {
          return {{"criteria", p.criteria}, {"supplementary", p.supplementary}};
        }
      },
      process);
  proc["type"] = process_name(process);

  json j{{"schema_version", schema_version},
         {"name", name},
         {"process", proc},
         {"scanner",
          {{"horizon", scanner.horizon},
           {"min_separation", scanner.min_separation},
           {"N", scanner.N},
           {"undecided_policy", regen::to_string(scanner.policy)},
           {"escalation_cap", scanner.escalation_cap}}},
         {"verification",
          {{"suites", verification.suites}, {"alpha", verification.alpha}, {"permutations", verification.permutations}}},
         {"seeds", seeds},
         {"output", {{"dir", output.dir}, {"cycles", output.cycles}}}};
  if (!description.empty()) j["description"] = description;
  if (oracle) {
    json o{{"alphabet", oracle->alphabet}, {"past", oracle->past},         {"past_k", oracle->past_k},
           {"future", oracle->future},     {"lookahead", oracle->lookahead}, {"T", oracle->T},
           {"min_separation", oracle->min_separation}, {"max_m", oracle->max_m},
           {"cross_check_N", oracle->cross_check_N}};
    if (oracle->witness) o["witness"] = {{"gap", oracle->witness->first}, {"symbol", oracle->witness->second}};
    j["oracle"] = o;
  }
  return j;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  std::vector<std::string> errors;
  ExperimentConfig c;
  Reader r(j, "", errors);
  if (r.ok()) {
    int version = 0;
    r.get("schema_version", version, true);
    if (r.has("schema_version") && version != kSchemaVersion)
      r.error("schema_version", "unsupported version " + std::to_string(version) + " (this build reads " +
                                    std::to_string(kSchemaVersion) + ")");
    r.get("name", c.name);
    r.get("description", c.description);
    require(!c.name.empty() && c.name.find('/') == std::string::npos, r, "name",
            "must be a nonempty name without '/'");
    if (const json* p = r.raw("process")) c.process = read_process(*p, errors);
    else r.error("process", "required key is missing");
    if (const json* s = r.raw("scanner")) c.scanner = read_scanner(*s, errors);
    if (const json* v = r.raw("verification")) c.verification = read_verification(*v, errors);
    if (const json* o = r.raw("output")) c.output = read_output(*o, errors);
    if (const json* o = r.raw("oracle")) c.oracle = read_oracle(*o, errors);
    c.seeds = read_seeds(r.raw("seeds"), r);
    r.finish();
  }
  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& e : errors) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::vector<std::string> validate_config_file(const std::filesystem::path& path) {
  try {
    load_config(path);
  } catch (const ConfigError& e) {
    std::vector<std::string> lines;
    std::istringstream is(e.what());
    for (std::string line; std::getline(is, line);) {
      const auto start = line.find_first_not_of(' ');
      if (start != std::string::npos && line != "invalid configuration:") lines.push_back(line.substr(start));
    }
    return lines;
  }
  return {};
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  const auto number = [&](const std::string& t) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || t.front() == '-') throw ConfigError("bad seed '" + t + "' in '" + s + "'");
    return v;
  };
  std::vector<std::uint64_t> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const auto a = number(s.substr(0, dots));
    const auto b = number(s.substr(dots + 2));
    if (b < a) throw ConfigError("seed range '" + s + "' is empty");
    if (b - a >= 100000) throw ConfigError("seed range '" + s + "' is too long");
    for (auto k = a; k <= b; ++k) out.push_back(k);
    return out;
  }
  std::istringstream is(s);
  for (std::string t; std::getline(is, t, ',');) out.push_back(number(t));
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

core::Law parse_law_spec(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    try {
      return core::law_from_json(json::parse(s));
    } catch (const json::parse_error& e) {
      throw ConfigError("law: not valid JSON: " + std::string(e.what()));
    }
  }
  std::vector<std::string> parts;
  std::istringstream is(s);
  for (std::string t; std::getline(is, t, ':');) parts.push_back(t);
  const auto num = [&](std::size_t i) {
    if (i >= parts.size()) throw ConfigError("law '" + s + "': missing parameter");
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw ConfigError("law '" + s + "': bad number '" + parts[i] + "'");
    }
  };
  if (parts.empty()) throw ConfigError("empty law");
  const auto& kind = parts.front();
  if (kind == "geometric" && parts.size() == 2) return core::law_from_json({{"type", "geometric"}, {"r", num(1)}});
  if (kind == "exponential" && parts.size() == 2)
    return core::law_from_json({{"type", "exponential"}, {"rate", num(1)}});
  if (kind == "uniform" && parts.size() == 3)
    return core::law_from_json({{"type", "uniform"}, {"lo", num(1)}, {"hi", num(2)}});
  if (kind == "walk" && parts.size() == 3) return core::Alphabet::skip_free_walk(num(1), num(2));
  throw ConfigError("law '" + s + "': expected geometric:r, exponential:rate, uniform:lo:hi, walk:p:q or JSON");
}

}  // namespace regenlab::cli
