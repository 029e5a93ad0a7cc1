#pragma once

#include <cstdint>
#include <vector>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/core/law.hpp"

namespace regenlab::core {

// Materialized block xi_lo..xi_hi (inclusive).
struct Window {
  std::int64_t lo = 1;
  std::int64_t hi = 0;
  std::vector<Symbol> values;

  std::size_t length() const noexcept { return values.size(); }
  Symbol at(std::int64_t index) const;
};

// The i.i.d. driving sequence {xi_n}, n >= 1. A stream is an immutable value;
// sample_at is a pure function of (seed, law, origin_offset + n), which makes
// shifting O(1) and lets any number of evaluators probe the future without
// consuming state.
class DrivingStream {
 public:
  DrivingStream(std::uint64_t seed, Law law, std::int64_t origin_offset = 0);

  Symbol sample_at(std::int64_t n) const;
  Window window(std::int64_t m, std::int64_t n) const;
  // sample_at(shift(k), n) == sample_at(n + k).
  DrivingStream shift(std::int64_t k) const;

  std::uint64_t seed() const noexcept { return rng_.seed(); }
  std::int64_t origin_offset() const noexcept { return offset_; }
  const Law& law() const noexcept { return law_; }
  const CounterRng& rng() const noexcept { return rng_; }

 private:
  CounterRng rng_;
  Law law_;
  std::int64_t offset_;
};

}  // namespace regenlab::core
