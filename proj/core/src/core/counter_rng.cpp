#include "regenlab/core/counter_rng.hpp"

#include <cmath>

namespace regenlab::core {

namespace {
constexpr std::uint64_t kTwo32 = std::uint64_t{1} << 32;
}

std::uint64_t CounterRng::bernoulli_word(std::int64_t index, std::uint32_t lane, Tag tag,
                                         std::uint64_t threshold) const noexcept {
  if (threshold >= kTwo32) return ~std::uint64_t{0};
  if (threshold == 0) return 0;
  // Bit b succeeds iff its uniform U_b = 0.w_0 w_1 ... < threshold / 2^32.
  // Digit k of every U_b comes from random word k; bits leave the undecided
  // set at the first digit where they differ from the threshold.
  std::uint64_t result = 0;
  std::uint64_t undecided = ~std::uint64_t{0};
  for (std::uint32_t k = 0; k < 32 && undecided != 0; k += 2) {
    const auto pair = word_pair(index, lane, tag, k >> 1);
    for (std::uint32_t h = 0; h < 2 && undecided != 0; ++h) {
      const std::uint64_t w = pair[h];
      if ((threshold >> (31 - (k + h))) & 1u) {
        result |= undecided & ~w;
        undecided &= w;
      } else {
        undecided &= ~w;
      }
      // Remaining threshold digits are zero: undecided bits cannot fall below it.
      if ((threshold & ((std::uint64_t{1} << (31 - (k + h))) - 1)) == 0) return result;
    }
  }
  return result;
}

std::uint64_t CounterRng::threshold_of(double p) noexcept {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return kTwo32;
  const auto t = static_cast<std::uint64_t>(std::llround(std::ldexp(p, 32)));
  return t > kTwo32 ? kTwo32 : t;
}

}  // namespace regenlab::core
