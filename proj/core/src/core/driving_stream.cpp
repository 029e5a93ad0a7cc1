#include "regenlab/core/driving_stream.hpp"

#include <string>

#include "regenlab/errors.hpp"

namespace regenlab::core {

Symbol Window::at(std::int64_t index) const {
  if (index < lo || index > hi) throw RangeError("window: index " + std::to_string(index) + " outside [" +
                                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return values[static_cast<std::size_t>(index - lo)];
}

DrivingStream::DrivingStream(std::uint64_t seed, Law law, std::int64_t origin_offset)
    : rng_(seed), law_(std::move(law)), offset_(origin_offset) {}

Symbol DrivingStream::sample_at(std::int64_t n) const {
  if (n < 1) throw IndexError("sample_at: index " + std::to_string(n) + " < 1");
  return sample_law(law_, rng_.uniform(offset_ + n, 0, Tag::kScalar));
}

Window DrivingStream::window(std::int64_t m, std::int64_t n) const {
  if (m > n) throw RangeError("window: m > n");
  if (m < 1) throw IndexError("window: m < 1");
  Window w{m, n, {}};
  w.values.reserve(static_cast<std::size_t>(n - m + 1));
  for (std::int64_t i = m; i <= n; ++i) w.values.push_back(sample_at(i));
  return w;
}

DrivingStream DrivingStream::shift(std::int64_t k) const { return DrivingStream(rng_.seed(), law_, offset_ + k); }

}  // namespace regenlab::core
