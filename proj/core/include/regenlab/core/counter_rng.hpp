#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, index, lane, tag, word). There is no sequential state, so a
// driving sequence can be probed at any index, any number of times, in any
// order, and always returns the same bits.
//
// The block function is Philox4x32-10 (Salmon et al., SC'11). One block
// yields 128 bits, i.e. two 64-bit words; word k of a counter lives in
// block k/2.

#include <array>
#include <cstdint>

namespace regenlab::core {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Tags partition the counter space between unrelated families of draws that
// share an index (e.g. left/right descendant bits and immunity bits).
enum class Tag : std::uint32_t {
  kScalar = 0,
  kLeft = 1,
  kRight = 2,
  kImmune = 3,
  kCategorical = 4,
  kLength = 5,
  kActivity = 6,
  kCoin = 7,
  kKernel = 8,
  kPsi = 9,
  kReplica = 10,
  kPermutation = 11,
  kSynthetic = 12,
};

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  // k-th 64-bit word of counter (index, lane, tag).
  std::uint64_t word(std::int64_t index, std::uint32_t lane, Tag tag,
                     std::uint32_t k = 0) const noexcept {
    const auto out = block(index, lane, tag, k >> 1);
    const std::size_t half = (k & 1u) * 2;
    return (std::uint64_t{out[half]} << 32) | out[half + 1];
  }

  // Two consecutive words (2j, 2j+1) from a single block evaluation.
  std::array<std::uint64_t, 2> word_pair(std::int64_t index, std::uint32_t lane,
                                         Tag tag, std::uint32_t j) const noexcept {
    const auto out = block(index, lane, tag, j);
    return {(std::uint64_t{out[0]} << 32) | out[1],
            (std::uint64_t{out[2]} << 32) | out[3]};
  }

  // Uniform on the open interval (0,1): midpoints of a 2^-52 grid.
  double uniform(std::int64_t index, std::uint32_t lane, Tag tag,
                 std::uint32_t k = 0) const noexcept {
    return to_open_unit(word(index, lane, tag, k));
  }

  // 64 independent Bernoulli bits with success probability
  // threshold / 2^32, obtained by comparing 64 word-parallel uniforms against
  // the binary expansion of the threshold. threshold <= 2^32.
  std::uint64_t bernoulli_word(std::int64_t index, std::uint32_t lane, Tag tag,
                               std::uint64_t threshold) const noexcept;

  static double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  }

  // Probability p in [0,1] rounded to the 32-bit threshold used by
  // bernoulli_word. The effective probability is threshold / 2^32.
  static std::uint64_t threshold_of(double p) noexcept;

 private:
  Philox4x32::Counter block(std::int64_t index, std::uint32_t lane, Tag tag,
                            std::uint32_t pair) const noexcept {
    const auto u = static_cast<std::uint64_t>(index);
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32), lane,
        (static_cast<std::uint32_t>(tag) << 20) | (pair & 0xFFFFFu)};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                                 static_cast<std::uint32_t>(seed_ >> 32)};
    return Philox4x32::apply(ctr, key);
  }

  std::uint64_t seed_;
};

}  // namespace regenlab::core
