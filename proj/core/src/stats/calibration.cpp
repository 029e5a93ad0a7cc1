#include "regenlab/stats/calibration.hpp"

#include <cmath>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/parallel.hpp"
#include "regenlab/errors.hpp"
#include "regenlab/stats/tests.hpp"

namespace regenlab::stats {

bool CalibrationResult::pass() const noexcept { return std::abs(rejection_rate - alpha) <= tolerance; }

nlohmann::json CalibrationResult::to_json() const {
  return {{"test", test},
          {"alpha", alpha},
          {"repetitions", repetitions},
          {"sample_size", sample_size},
          {"rejection_rate", rejection_rate},
          {"tolerance", tolerance},
          {"pass", pass()}};
}

std::string to_string(CalibratedTest t) {
  switch (t) {
    case CalibratedTest::kKolmogorovSmirnov: return "ks_two_sample";
    case CalibratedTest::kPermutation: return "permutation_independence";
    case CalibratedTest::kChiSquare: return "chi_square_gof";
  }
  return "unknown";
}

namespace {

constexpr double kCellProbs[6] = {0.1, 0.15, 0.2, 0.25, 0.2, 0.1};

bool one_repetition(CalibratedTest test, const core::CounterRng& rng, int rep, std::size_t n, double alpha,
                    int permutations) {
  const auto draw = [&](std::size_t i, std::uint32_t lane) {
    return rng.uniform(static_cast<std::int64_t>(i) + 1, lane, core::Tag::kSynthetic, static_cast<std::uint32_t>(rep));
  };
  switch (test) {
    case CalibratedTest::kKolmogorovSmirnov: {
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = draw(i, 0);
        b[i] = draw(i, 1);
      }
      return ks_two_sample(a, b, alpha).reject;
    }
    case CalibratedTest::kPermutation: {
      std::vector<double> u(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = draw(i, 2);
        v[i] = draw(i, 3);
      }
      return permutation_independence(u, v, permutations, rng.seed() ^ (0x9E3779B97F4A7C15ull * (rep + 1)), alpha).reject;
    }
    case CalibratedTest::kChiSquare: {
      std::vector<double> counts(6, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double u = draw(i, 4);
        std::size_t c = 0;
        while (c + 1 < 6 && u >= kCellProbs[c]) u -= kCellProbs[c++];
        counts[c] += 1;
      }
      return chi_square_gof(counts, kCellProbs, alpha).reject;
    }
  }
  return false;
}

}  // namespace

CalibrationResult calibrate_null(CalibratedTest test, int repetitions, std::size_t n, std::uint64_t seed, double alpha,
                                 int permutations) {
  if (repetitions < 1 || n < 2) throw ConfigError("calibration needs at least one repetition and two samples");
  const core::CounterRng rng(seed);
  std::vector<char> rejected(static_cast<std::size_t>(repetitions), 0);
  core::parallel_for(rejected.size(), [&](std::size_t r) {
    rejected[r] = one_repetition(test, rng, static_cast<int>(r), n, alpha, permutations) ? 1 : 0;
  });
  CalibrationResult out;
  out.test = to_string(test);
  out.alpha = alpha;
  out.repetitions = repetitions;
  out.sample_size = n;
  std::size_t count = 0;
  for (char c : rejected) count += c;
  out.rejection_rate = static_cast<double>(count) / repetitions;
  return out;
}

std::vector<CalibrationResult> calibrate_all(int repetitions, std::uint64_t seed, double alpha) {
  return {calibrate_null(CalibratedTest::kKolmogorovSmirnov, repetitions, 10000, seed, alpha),
          calibrate_null(CalibratedTest::kPermutation, repetitions, 200, seed + 1, alpha),
          calibrate_null(CalibratedTest::kChiSquare, repetitions, 1000, seed + 2, alpha)};
}

}  // namespace regenlab::stats
