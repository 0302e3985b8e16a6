#include <cmath>
#include <set>

#include "doctest.h"
#include "ldplab/rng.hpp"

using namespace ldplab;

// Known-answer vectors of the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draws depend only on their address") {
  const CounterNormals a(42), b(42), c(43);
  CHECK(a.normal(7, 3, 1) == b.normal(7, 3, 1));
  CHECK(a.normal(7, 3, 1) != c.normal(7, 3, 1));
  // Evaluation order is irrelevant.
  const double late = a.normal(1000, 9, 0);
  for (int i = 0; i < 100; ++i) (void)a.normal(i, 0, 0);
  CHECK(a.normal(1000, 9, 0) == late);
  // Streams above 2^32 are distinct.
  CHECK(a.normal(1ull << 32, 0, 0) != a.normal(0, 0, 0));
  // Uniform draws do not reuse normal blocks.
  CHECK(a.uniform(5, 5, 0) != a.uniform(5, 5, 1));
}

TEST_CASE("moments") {
  const CounterNormals z(1);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0, u1 = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double v = z.normal(static_cast<std::uint64_t>(i / 4), 0, static_cast<std::uint32_t>(i % 4));
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
    const double u = z.uniform(static_cast<std::uint64_t>(i), 1, 0);
    u1 += u;
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
  CHECK(std::abs(u1 / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
}
