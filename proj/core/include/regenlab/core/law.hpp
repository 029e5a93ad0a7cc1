#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenlab::core {

using Symbol = double;

// Finite law over numeric symbols. Weights are validated to sum to one
// within 1e-12; exact rational alphabets live in the oracle module.
class Alphabet {
 public:
  Alphabet(std::vector<Symbol> symbols, std::vector<double> weights);

  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return symbols_.size(); }

  double probability_of(Symbol s) const noexcept;
  // Inverse CDF on (0,1).
  Symbol quantile(double u) const noexcept;
  double mean() const noexcept;

  // P(xi = +1) = p, P(xi = -1) = q, P(xi = 0) = 1 - p - q.
  static Alphabet skip_free_walk(double p, double q);
  static Alphabet degenerate(Symbol s);

 private:
  std::vector<Symbol> symbols_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

struct ExponentialLaw {
  double rate = 1.0;
};

// Support {1, 2, ...} with P(xi > k) = r^k.
struct GeometricLaw {
  double r = 0.5;
};

using Law = std::variant<Alphabet, UniformLaw, ExponentialLaw, GeometricLaw>;

Symbol sample_law(const Law& law, double u);
double law_mean(const Law& law);
// P(xi <= x) for the declared law.
double law_cdf(const Law& law, double x);
std::string law_name(const Law& law);

// {"type": "finite", "symbols": [...], "weights": [...]}
// {"type": "geometric", "r": 0.5}, {"type": "exponential", "rate": 1}
// {"type": "uniform", "lo": 0, "hi": 1}
Law law_from_json(const nlohmann::json& j);
nlohmann::json law_to_json(const Law& law);

}  // namespace regenlab::core
