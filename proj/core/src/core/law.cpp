#include "regenlab/core/law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regenlab/errors.hpp"

namespace regenlab::core {

Alphabet::Alphabet(std::vector<Symbol> symbols, std::vector<double> weights)
    : symbols_(std::move(symbols)), weights_(std::move(weights)) {
  if (symbols_.empty()) throw ConfigError("alphabet: no symbols");
  if (symbols_.size() != weights_.size())
    throw ConfigError("alphabet: symbols and weights differ in length");
  double total = 0.0;
  bool positive = false;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("alphabet: negative or non-finite weight");
    positive = positive || w > 0.0;
    total += w;
  }
  if (!positive) throw ConfigError("alphabet: all weights are zero");
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("alphabet: weights do not sum to 1");
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;
}

double Alphabet::probability_of(Symbol s) const noexcept {
  double p = 0.0;
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == s) p += weights_[i];
  return p;
}

Symbol Alphabet::quantile(double u) const noexcept {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  auto i = static_cast<std::size_t>(it - cumulative_.begin());
  // Skip zero-weight symbols that share a cumulative value.
  while (weights_[i] == 0.0 && i + 1 < weights_.size()) ++i;
  return symbols_[i];
}

double Alphabet::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) m += symbols_[i] * weights_[i];
  return m;
}

Alphabet Alphabet::skip_free_walk(double p, double q) {
  if (p < 0.0 || q < 0.0 || p + q > 1.0 + 1e-15) throw ConfigError("skip_free_walk: need p, q >= 0 and p + q <= 1");
  return Alphabet({-1.0, 0.0, 1.0}, {q, std::max(0.0, 1.0 - p - q), p});
}

Alphabet Alphabet::degenerate(Symbol s) { return Alphabet({s}, {1.0}); }

namespace {
template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;
}  // namespace

Symbol sample_law(const Law& law, double u) {
  return std::visit(
      Overload{
          [u](const Alphabet& a) { return a.quantile(u); },
          [u](const UniformLaw& l) { return l.lo + (l.hi - l.lo) * u; },
          [u](const ExponentialLaw& l) { return -std::log(u) / l.rate; },
          [u](const GeometricLaw& l) {
            if (l.r <= 0.0) return 1.0;
            return std::max(1.0, std::ceil(std::log(u) / std::log(l.r)));
          },
      },
      law);
}

double law_mean(const Law& law) {
  return std::visit(Overload{
                        [](const Alphabet& a) { return a.mean(); },
                        [](const UniformLaw& l) { return 0.5 * (l.lo + l.hi); },
                        [](const ExponentialLaw& l) { return 1.0 / l.rate; },
                        [](const GeometricLaw& l) { return 1.0 / (1.0 - l.r); },
                    },
                    law);
}

double law_cdf(const Law& law, double x) {
  return std::visit(Overload{
                        [x](const Alphabet& a) {
                          double c = 0.0;
                          for (std::size_t i = 0; i < a.size(); ++i)
                            if (a.symbols()[i] <= x) c += a.weights()[i];
                          return std::min(1.0, c);
                        },
                        [x](const UniformLaw& l) { return std::clamp((x - l.lo) / (l.hi - l.lo), 0.0, 1.0); },
                        [x](const ExponentialLaw& l) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-l.rate * x); },
                        [x](const GeometricLaw& l) {
                          if (x < 1.0) return 0.0;
                          return 1.0 - std::pow(l.r, std::floor(x));
                        },
                    },
                    law);
}

std::string law_name(const Law& law) {
  return std::visit(Overload{
                        [](const Alphabet&) { return std::string("finite"); },
                        [](const UniformLaw&) { return std::string("uniform"); },
                        [](const ExponentialLaw&) { return std::string("exponential"); },
                        [](const GeometricLaw&) { return std::string("geometric"); },
                    },
                    law);
}

namespace {
double number_at(const nlohmann::json& j, const char* key, double fallback, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw ConfigError(std::string("law: missing key '") + key + "'");
    return fallback;
  }
  if (!it->is_number()) throw ConfigError(std::string("law: key '") + key + "' must be a number");
  return it->get<double>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("law: unknown key '" + it.key() + "'");
  }
}
}  // namespace

Law law_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("law: expected an object");
  auto t = j.find("type");
  if (t == j.end() || !t->is_string()) throw ConfigError("law: missing string key 'type'");
  const std::string type = t->get<std::string>();
  if (type == "finite") {
    reject_unknown(j, {"type", "symbols", "weights"});
    auto s = j.find("symbols");
    auto w = j.find("weights");
    if (s == j.end() || w == j.end() || !s->is_array() || !w->is_array())
      throw ConfigError("law: finite law needs arrays 'symbols' and 'weights'");
    std::vector<Symbol> symbols;
    std::vector<double> weights;
    for (const auto& v : *s) {
      if (!v.is_number()) throw ConfigError("law: symbols must be numbers");
      symbols.push_back(v.get<double>());
    }
    for (const auto& v : *w) {
      if (!v.is_number()) throw ConfigError("law: weights must be numbers");
      weights.push_back(v.get<double>());
    }
    return Alphabet(std::move(symbols), std::move(weights));
  }
  if (type == "geometric") {
    reject_unknown(j, {"type", "r"});
    const double r = number_at(j, "r", 0.5, true);
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("law: geometric r must lie in [0,1)");
    return GeometricLaw{r};
  }
  if (type == "exponential") {
    reject_unknown(j, {"type", "rate"});
    const double rate = number_at(j, "rate", 1.0, false);
    if (!(rate > 0.0)) throw ConfigError("law: exponential rate must be positive");
    return ExponentialLaw{rate};
  }
  if (type == "uniform") {
    reject_unknown(j, {"type", "lo", "hi"});
    const double lo = number_at(j, "lo", 0.0, false);
    const double hi = number_at(j, "hi", 1.0, false);
    if (!(hi > lo)) throw ConfigError("law: uniform needs lo < hi");
    return UniformLaw{lo, hi};
  }
  throw ConfigError("law: unknown type '" + type + "'");
}

nlohmann::json law_to_json(const Law& law) {
  return std::visit(Overload{
                        [](const Alphabet& a) {
                          return nlohmann::json{{"type", "finite"}, {"symbols", a.symbols()}, {"weights", a.weights()}};
                        },
                        [](const UniformLaw& l) { return nlohmann::json{{"type", "uniform"}, {"lo", l.lo}, {"hi", l.hi}}; },
                        [](const ExponentialLaw& l) { return nlohmann::json{{"type", "exponential"}, {"rate", l.rate}}; },
                        [](const GeometricLaw& l) { return nlohmann::json{{"type", "geometric"}, {"r", l.r}}; },
                    },
                    law);
}

}  // namespace regenlab::core
