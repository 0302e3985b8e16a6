#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "ldplab/models.hpp"
#include "ldplab/rng.hpp"

using namespace ldplab;

namespace {

std::vector<std::shared_ptr<CoefficientModel>> builtin_models() {
  return {
      ConstantModel::scalar(0.3, 0.5),
      std::make_shared<ConstantModel>(std::vector<double>{1.0, -1.0},
                                      std::vector<double>{1.0, 0.0, 0.5, 2.0}, 2),
      std::make_shared<LinearDriftModel>(1.5, 0.2, 0.4),
      std::make_shared<ScalarVolModel>(local_vol(0.2, 0.1), 0.1),
      std::make_shared<ScalarVolModel>(running_max_vol(0.3, 0.05)),
      std::make_shared<ScalarVolModel>(delay_vol(0.25, 0.1, 0.2)),
      std::make_shared<ScalarVolModel>(time_scaled_vol(0.2, 0.5)),
      std::make_shared<LogPriceModel>(running_max_vol(0.2, 0.05)),
      std::make_shared<LogPriceModel>(constant_vol(0.3)),
  };
}

// Peeks at the terminal state: the negative control for the
// nonanticipation check.
class Clairvoyant final : public CoefficientModel {
 public:
  std::string kind() const override { return "clairvoyant"; }
  std::size_t noise_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  void drift(std::size_t, const DiscretePath&, const DiscretePath& x,
             std::span<double> out) const override {
    out[0] = std::tanh(x(x.nodes() - 1, 0));
  }
  void diffusion(std::size_t, const DiscretePath&, const DiscretePath&,
                 std::span<double> out) const override {
    out[0] = 1.0;
  }
  ModelBounds bounds() const override { return {1.0, 1.0, 1.0, 1.0}; }
};

DiscretePath walk(const TimeGrid& g, std::uint64_t seed) {
  const CounterNormals z(seed);
  DiscretePath p(g, 1);
  for (std::size_t i = 1; i < p.nodes(); ++i)
    p(i, 0) = p(i - 1, 0) + std::sqrt(g.dt()) * z.normal(0, static_cast<std::uint32_t>(i), 0);
  return p;
}

}  // namespace

TEST_CASE("built-in models are nonanticipative") {
  for (const auto& m : builtin_models()) {
    const auto report = check_nonanticipative(*m, 200, 1);
    INFO(m->kind());
    CHECK(report.trials == 200);
    CHECK(report.ok());
  }
  CHECK_FALSE(check_nonanticipative(Clairvoyant(), 200, 1).ok());
}

TEST_CASE("sampled Lipschitz constants respect the declared ones") {
  for (const auto& m : builtin_models()) {
    INFO(m->kind());
    CHECK(estimate_lipschitz(*m, 1000, 2) <= m->bounds().lipschitz * 1.01 + 1e-12);
  }
  const ScalarVolModel lv(local_vol(0.2, 0.1));
  const double est = estimate_lipschitz(lv, 1000, 3);
  CHECK(est <= 0.1 * 1.01);
  CHECK(est > 0.01);
}

TEST_CASE("payoff Lipschitz and bounds") {
  const ClippedLinear lin({1.0}, 2.0);
  CHECK(estimate_lipschitz(lin, 1, 1, 1000, 4) <= 1.0 + 1e-12);
  const ClippedLinear lin2({0.6, 0.8}, kUnbounded);
  CHECK(lin2.lipschitz() == doctest::Approx(1.0));
  CHECK(estimate_lipschitz(lin2, 2, 2, 1000, 5) <= 1.0 + 1e-12);
  const RunningMaxPayoff rm(0.7, 1.0);
  CHECK(estimate_lipschitz(rm, 1, 1, 1000, 6) <= 0.7 + 1e-12);

  const TimeGrid g(1.0, 16);
  for (std::uint64_t s = 0; s < 100; ++s) {
    DiscretePath x = walk(g, s);
    for (std::size_t i = 0; i < x.nodes(); ++i) x(i, 0) *= 4.0;
    const DiscretePath w(g, 1);
    CHECK(std::abs(lin.value(w, x)) <= lin.bound());
    CHECK(std::abs(rm.value(w, x)) <= rm.bound());
    double mx = x(0, 0);
    for (std::size_t i = 0; i < x.nodes(); ++i) mx = std::max(mx, x(i, 0));
    CHECK(rm.value(w, x) == std::clamp(0.7 * mx, -1.0, 1.0));
  }
}

TEST_CASE("volatility functionals") {
  const TimeGrid g(1.0, 20);
  const auto rmv = running_max_vol(0.3, 0.05);
  const auto lv = local_vol(0.2, 0.1);
  const auto dv = delay_vol(0.25, 0.1, 0.2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto x = walk(g, 100 + s);
    double mx = x(0, 0);
    for (std::size_t i = 0; i < x.nodes(); ++i) {
      mx = std::max(mx, x(i, 0));
      CHECK(rmv->value(i, x) == doctest::Approx(0.3 + 0.05 * std::tanh(mx)));
      CHECK(lv->value(i, x) == doctest::Approx(0.2 + 0.1 * std::tanh(x(i, 0))));
      const std::size_t lag = i >= 4 ? i - 4 : 0;
      CHECK(dv->value(i, x) == doctest::Approx(0.25 + 0.1 * std::tanh(x(lag, 0))));
      for (const auto* v : {rmv.get(), lv.get(), dv.get()}) {
        CHECK(v->value(i, x) >= v->lower());
        CHECK(v->value(i, x) <= v->upper());
      }
    }
  }
  CHECK(constant_vol(0.2)->time_indifferent());
  CHECK(rmv->time_indifferent());
  CHECK_FALSE(time_scaled_vol(0.2, 0.5)->time_indifferent());
  CHECK(time_scaled_vol(0.2, 0.0)->time_indifferent());
}

TEST_CASE("ellipticity floors") {
  for (const auto& m : builtin_models()) {
    INFO(m->kind());
    const double floor = m->bounds().ellipticity_floor;
    CHECK(sampled_ellipticity(*m, 300, 7) >= floor * (1.0 - 1e-12));
  }
  const ScalarVolModel lv(local_vol(0.2, 0.1));
  CHECK(lv.bounds().ellipticity_floor == doctest::Approx(0.01));
  const ConstantModel degenerate({0.0, 0.0}, {1.0, 1.0}, 1);
  CHECK(degenerate.bounds().ellipticity_floor == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("drift and diffusion bounds hold on samples") {
  const TimeGrid g(1.0, 16);
  for (const auto& m : builtin_models()) {
    const auto b = m->bounds();
    INFO(m->kind());
    const std::size_t n = m->state_dim(), d = m->noise_dim();
    std::vector<double> drift(n), sigma(n * d);
    for (std::uint64_t s = 0; s < 40; ++s) {
      DiscretePath omega(g, d), x(g, n);
      const CounterNormals z(s);
      for (std::size_t i = 0; i < omega.nodes(); ++i) {
        for (std::size_t c = 0; c < d; ++c) omega(i, c) = z.normal(1, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
        for (std::size_t c = 0; c < n; ++c) x(i, c) = 3.0 * z.normal(2, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
      }
      for (std::size_t i = 0; i <= g.steps(); ++i) {
        m->drift(i, omega, x, drift);
        m->diffusion(i, omega, x, sigma);
        double bn = 0.0, sn = 0.0;
        for (double v : drift) bn += v * v;
        for (double v : sigma) sn += v * v;
        CHECK(std::sqrt(bn) <= b.drift_bound * (1 + 1e-12));
        CHECK(std::sqrt(sn) <= b.diffusion_bound * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("log-price drift") {
  const LogPriceModel m(constant_vol(0.4));
  const TimeGrid g(1.0, 4);
  const DiscretePath w(g, 1), x(g, 1);
  double b = 1.0;
  m.drift(0, w, x, {&b, 1});
  CHECK(b == 0.0);
  m.drift_eps(0.5, 0, w, x, {&b, 1});
  CHECK(b == doctest::Approx(-0.5 * 0.5 * 0.16));
  CHECK(m.constant_scalar_diffusion().value() == doctest::Approx(0.4));
  CHECK_FALSE(LogPriceModel(local_vol(0.2, 0.1)).constant_scalar_diffusion().has_value());
}

TEST_CASE("interval domain") {
  const Interval o(-1.0, 1.0);
  const double zero = 0.0;
  CHECK(o.signed_distance({&zero, 1}) == -1.0);
  CHECK(o.boundary_project({&zero, 1})[0] == 1.0);
  const double out = 1.5, edge = -1.0;
  CHECK(o.signed_distance({&out, 1}) == doctest::Approx(0.5));
  CHECK_FALSE(o.inside({&edge, 1}));
  CHECK(o.distance_to_complement({&out, 1}) == 0.0);
  CHECK(o.radius() >= 1.0);
  CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("ball domain") {
  const Ball o({0.0, 0.0}, 2.0);
  const std::vector<double> x{3.0, 0.0};
  CHECK(o.signed_distance(x) == doctest::Approx(1.0));
  const auto p = o.boundary_project(x);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(o.signed_distance(std::vector<double>{0.0, 0.0}) == doctest::Approx(-2.0));
}

TEST_CASE("domain signed distance properties") {
  const Interval iv(-0.5, 2.0);
  const Ball ball({0.5, -0.5}, 1.5);
  const Box box({-1.0, -0.5}, {1.0, 2.0});
  const CounterNormals z(21);
  for (const Domain* o : std::initializer_list<const Domain*>{&iv, &ball, &box}) {
    INFO(o->kind());
    const std::size_t n = o->dim();
    for (std::uint32_t t = 0; t < 300; ++t) {
      std::vector<double> a(n), b(n);
      for (std::size_t c = 0; c < n; ++c) {
        a[c] = 1.5 * z.normal(0, t, static_cast<std::uint32_t>(c));
        b[c] = 1.5 * z.normal(1, t, static_cast<std::uint32_t>(c));
      }
      double ab = 0.0;
      for (std::size_t c = 0; c < n; ++c) ab += (a[c] - b[c]) * (a[c] - b[c]);
      CHECK(std::abs(o->signed_distance(a) - o->signed_distance(b)) <= std::sqrt(ab) + 1e-12);

      const auto p = o->boundary_project(a);
      double ap = 0.0;
      for (std::size_t c = 0; c < n; ++c) ap += (a[c] - p[c]) * (a[c] - p[c]);
      CHECK(std::sqrt(ap) == doctest::Approx(std::abs(o->signed_distance(a))).epsilon(1e-9));
      CHECK(std::abs(o->signed_distance(p)) <= 1e-12);

      double r = 0.0;
      for (std::size_t c = 0; c < n; ++c) r += a[c] * a[c];
      if (o->inside(a)) CHECK(std::sqrt(r) <= o->radius());
    }
  }
}

TEST_CASE("box distance against a boundary scan") {
  const std::vector<double> lo{-1.0, -0.5}, hi{1.0, 2.0};
  const Box box(lo, hi);
  // Dense samples of the four edges.
  std::vector<std::array<double, 2>> edge;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double x = lo[0] + u * (hi[0] - lo[0]), y = lo[1] + u * (hi[1] - lo[1]);
    edge.push_back({x, lo[1]});
    edge.push_back({x, hi[1]});
    edge.push_back({lo[0], y});
    edge.push_back({hi[0], y});
  }
  const CounterNormals z(5);
  int checked = 0;
  for (std::uint32_t t = 0; checked < 100; ++t) {
    const std::vector<double> p{1.2 * z.normal(0, t, 0), 0.75 + 1.5 * z.normal(0, t, 1)};
    double d = 1e300;
    for (const auto& e : edge) d = std::min(d, std::hypot(p[0] - e[0], p[1] - e[1]));
    if (d < 0.05) continue;  // sampling error grows near the boundary
    const bool in = p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1];
    CHECK(box.signed_distance(p) == doctest::Approx(in ? -d : d).epsilon(1e-6));
    ++checked;
  }
}

TEST_CASE("clipped call") {
  const ClippedCall c(0.1);
  CHECK(c.bound() == doctest::Approx(std::exp(11.0)));
  const TimeGrid g(1.0, 2);
  const DiscretePath w(g, 1);
  CHECK(c.value(w, DiscretePath(g, 1, {0.0, 0.0, 0.0})) == 0.0);
  CHECK(c.value(w, DiscretePath(g, 1, {0.0, 0.0, 0.5})) == doctest::Approx(std::exp(0.5) - std::exp(0.1)));
  CHECK(c.value(w, DiscretePath(g, 1, {0.0, 0.0, 50.0})) == c.bound());
  CHECK(ClippedCall(0.1, 2.0).value(w, DiscretePath(g, 1, {0.0, 0.0, 3.0})) == 2.0);

  CHECK(std::isinf(ClippedCall::log_payoff(0.1, 0.1)));
  for (double x : {0.2, 0.5, 1.0, 3.0})
    CHECK(ClippedCall::log_payoff(x, 0.1) == doctest::Approx(std::log(std::exp(x) - std::exp(0.1))));
  // Tiny moneyness without cancellation.
  CHECK(ClippedCall::log_payoff(1e-12, 0.0) == doctest::Approx(std::log(1e-12)).epsilon(1e-6));
}
