#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenlab::stats {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
  double alpha = 0.05;
  bool reject = false;

  nlohmann::json to_json() const;
};

// Two-sample Kolmogorov-Smirnov. Exact statistic over the pooled sample
// (ties handled), asymptotic p-value with Stephens' small-sample correction.
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.05);
double ks_statistic(std::span<const double> a, std::span<const double> b);
// Survival function of the Kolmogorov distribution.
double kolmogorov_q(double lambda);

// Distance correlation of two univariate samples, O(n log n).
double distance_correlation(std::span<const double> x, std::span<const double> y);
// Distance correlation of vector samples (rows), O(n^2).
double distance_correlation(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y);

// Permutation test of independence between u and v using distance
// correlation. The p-value is (1 + #{perm >= observed}) / (B + 1).
TestReport permutation_independence(std::span<const double> u, std::span<const double> v, int permutations = 999,
                                    std::uint64_t seed = 0, double alpha = 0.05);
TestReport permutation_independence(const std::vector<std::vector<double>>& u,
                                    const std::vector<std::vector<double>>& v, int permutations = 999,
                                    std::uint64_t seed = 0, double alpha = 0.05);

// Pearson chi-square goodness of fit of counts against probabilities.
// Cells with expected count below min_expected are pooled with their
// neighbour to the right.
TestReport chi_square_gof(std::span<const double> counts, std::span<const double> probs, double alpha = 0.05,
                          double min_expected = 5.0);

}  // namespace regenlab::stats
