#pragma once

#include <array>
#include <cstdint>

namespace ldplab {

/// Philox4x32-10 block: a keyed bijection of 128-bit counters.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Standard normal draws addressed by (seed, stream, step, lane). The same
/// address always yields the same value, independent of evaluation order.
class CounterNormals {
 public:
  explicit CounterNormals(std::uint64_t seed) noexcept;

  double normal(std::uint64_t stream, std::uint32_t step, std::uint32_t lane) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint32_t step, std::uint32_t lane) const;

 private:
  PhiloxKey key_;
};

}  // namespace ldplab
