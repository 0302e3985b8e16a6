#include "ldplab/rng.hpp"

#include <cmath>
#include <numbers>

namespace ldplab {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit mantissa, centred in its cell so 0 and 1 are never produced.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

CounterNormals::CounterNormals(std::uint64_t seed) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

double CounterNormals::normal(std::uint64_t stream, std::uint32_t step,
                              std::uint32_t lane) const {
  // One block yields two normals (Box-Muller on two 53-bit uniforms).
  const PhiloxCounter out = philox4x32(
      {step, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
       lane / 2},
      key_);
  const double u1 = to_open_unit(out[0], out[1]);
  const double u2 = to_open_unit(out[2], out[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (lane % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
}

double CounterNormals::uniform(std::uint64_t stream, std::uint32_t step,
                               std::uint32_t lane) const {
  const PhiloxCounter out = philox4x32(
      {step, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
       0x80000000u | (lane / 2)},
      key_);
  return (lane % 2 == 0) ? to_open_unit(out[0], out[1]) : to_open_unit(out[2], out[3]);
}

}  // namespace ldplab
