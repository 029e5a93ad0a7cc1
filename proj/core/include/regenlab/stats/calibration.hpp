#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenlab::stats {

struct CalibrationResult {
  std::string test;
  double alpha = 0.05;
  int repetitions = 0;
  std::size_t sample_size = 0;
  double rejection_rate = 0.0;
  double tolerance = 0.02;

  bool pass() const noexcept;
  nlohmann::json to_json() const;
};

enum class CalibratedTest : std::uint8_t { kKolmogorovSmirnov, kPermutation, kChiSquare };

std::string to_string(CalibratedTest t);

// Null rejection rate of a test over synthetic repetitions drawn from the
// counter-based generator. KS: two uniform samples of size n. Permutation:
// n independent uniform pairs. Chi-square: n draws from a 6-cell law.
CalibrationResult calibrate_null(CalibratedTest test, int repetitions, std::size_t n, std::uint64_t seed,
                                 double alpha = 0.05, int permutations = 999);

std::vector<CalibrationResult> calibrate_all(int repetitions, std::uint64_t seed, double alpha = 0.05);

}  // namespace regenlab::stats
