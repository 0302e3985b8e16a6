#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ldplab/paths.hpp"
#include "ldplab/rng.hpp"

using namespace ldplab;

namespace {

DiscretePath random_path(const TimeGrid& g, std::size_t dim, std::uint64_t seed, double scale = 1.0) {
  const CounterNormals z(seed);
  DiscretePath p(g, dim);
  for (std::size_t i = 0; i < p.nodes(); ++i)
    for (std::size_t c = 0; c < dim; ++c) p(i, c) = scale * z.normal(0, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
  return p;
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("time grid nodes") {
  const TimeGrid g(1.0, 3);
  CHECK(g.time(3) == 1.0);
  CHECK(g.time(1) < g.time(2));
  CHECK(std::abs(g.dt() * 3 - 1.0) <= 1e-16);
  CHECK(g.node_of(2.0 / 3.0) == 2);
  CHECK_THROWS_AS(g.node_of(0.5), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
  CHECK(g.tail_from(1).steps() == 2);
  CHECK(g.tail_from(1).compatible_with(TimeGrid(2.0 / 3.0, 2)));
  CHECK_THROWS_AS(g.tail_from(3), std::invalid_argument);
}

TEST_CASE("sup_norm_to") {
  const TimeGrid g(1.0, 2);
  CHECK(sup_norm_to(DiscretePath(g, 1), 0.5) == 0.0);
  const DiscretePath p(g, 1, {0.0, 1.0, -3.0});
  CHECK(sup_norm_to(p, 1.0) == 3.0);
  CHECK(sup_norm_to(p, 0.5) == 1.0);

  const TimeGrid h(1.0, 40);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto q = random_path(h, 2, s);
    double brute = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < q.nodes(); ++i) {
      brute = std::max(brute, std::hypot(q(i, 0), q(i, 1)));
      const double m = sup_norm_to(q, h.time(i));
      CHECK(m >= prev);
      prev = m;
    }
    CHECK(sup_norm_to(q, 1.0) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("concat") {
  const TimeGrid g(1.0, 2);
  const DiscretePath base(g, 1, {0.0, 1.0, 5.0});
  const DiscretePath tail(g.tail_from(1), 1, {0.0, 2.0});
  const auto joined = concat(base, 0.5, tail);
  CHECK(joined(0, 0) == 0.0);
  CHECK(joined(1, 0) == 1.0);
  CHECK(joined(2, 0) == 3.0);

  CHECK(concat(base, 1.0, DiscretePath(g, 1)) == base);

  const TimeGrid h(1.0, 16);
  const auto t2 = random_path(h, 1, 5);
  DiscretePath shifted = t2;
  for (std::size_t i = 0; i < shifted.nodes(); ++i) shifted(i, 0) -= t2(0, 0);
  const auto from_zero = concat(DiscretePath(h, 1), 0.0, shifted);
  for (std::size_t i = 0; i < h.steps() + 1; ++i) CHECK(from_zero(i, 0) == shifted(i, 0));

  // Restriction to [0, t] is untouched.
  const auto b = random_path(h, 2, 7);
  const auto tl = random_path(h.tail_from(5), 2, 8);
  const auto c = concat(b, h.time(5), tl);
  for (std::size_t i = 0; i <= 5; ++i)
    for (std::size_t k = 0; k < 2; ++k) CHECK(c(i, k) == b(i, k));
}

TEST_CASE("pseudo distance") {
  const TimeGrid g(1.0, 10);
  const auto p = random_path(g, 2, 1);
  const PathPoint a{4, p};
  CHECK(pseudo_distance(a, a) == 0.0);

  // Same path frozen at t, compared at t + dt with a flat extension.
  const PathPoint later{5, stopped_at(p, 4)};
  CHECK(pseudo_distance(a, later) == doctest::Approx(g.dt()).epsilon(1e-12));

  for (std::uint64_t s = 0; s < 50; ++s) {
    const PathPoint x{s % 11, random_path(g, 2, 3 * s)};
    const PathPoint y{(s * 7) % 11, random_path(g, 2, 3 * s + 1)};
    const PathPoint z{(s * 3) % 11, random_path(g, 2, 3 * s + 2)};
    CHECK(pseudo_distance(x, y) == pseudo_distance(y, x));
    CHECK(pseudo_distance(x, z) <= pseudo_distance(x, y) + pseudo_distance(y, z) + 1e-12);

    double sup = 0.0;
    for (std::size_t i = 0; i < x.path.nodes(); ++i)
      sup = std::max(sup, euclid(x.path.at(std::min(i, x.node)), y.path.at(std::min(i, y.node))));
    CHECK(pseudo_distance(x, y) == doctest::Approx(std::abs(x.time() - y.time()) + sup));
  }
}

TEST_CASE("lipschitz constant") {
  const TimeGrid g(1.0, 8);
  CHECK(lipschitz_constant(DiscretePath(g, 1)) == 0.0);
  DiscretePath line(g, 1);
  for (std::size_t i = 0; i < line.nodes(); ++i) line(i, 0) = 3.0 * g.time(i);
  CHECK(lipschitz_constant(line) == doctest::Approx(3.0));

  const auto p = random_path(g, 2, 9);
  double brute = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes(); ++i) brute = std::max(brute, euclid(p.at(i + 1), p.at(i)));
  CHECK(lipschitz_constant(p) == doctest::Approx(brute / g.dt()));
}

TEST_CASE("control action") {
  const TimeGrid g(2.0, 5);
  const CounterNormals z(4);
  std::vector<double> s(10);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = z.normal(1, static_cast<std::uint32_t>(i), 0);
  const ControlPath a(g, 2, s);
  double dot = 0.0;
  for (const double v : s) dot += v * v;
  CHECK(a.action() == doctest::Approx(0.5 * dot * g.dt()));
  for (auto& v : s) v = -v;
  CHECK(ControlPath(g, 2, s).action() == a.action());
  CHECK_THROWS_AS(ControlPath(g, 2, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("path point split and csv round trip") {
  const TimeGrid g(1.0, 6);
  const auto w = random_path(g, 2, 11);
  const auto x = random_path(g, 1, 12);
  const auto theta = PathPoint::join(3, w, x);
  CHECK(theta.path.dim() == 3);
  CHECK(theta.omega_part(2) == w);
  CHECK(theta.state_part(2) == x);

  std::stringstream io;
  write_csv(io, w);
  CHECK(read_csv(io) == w);
}
