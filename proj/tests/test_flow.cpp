#include <cmath>
#include <vector>

#include "doctest.h"
#include "ldplab/flow.hpp"
#include "ldplab/rng.hpp"

using namespace ldplab;

namespace {

ControlPath random_control(const TimeGrid& g, std::size_t d, std::uint64_t seed, double scale = 1.0) {
  const CounterNormals z(seed);
  ControlPath a(g, d);
  for (std::size_t i = 0; i < g.steps(); ++i)
    for (std::size_t c = 0; c < d; ++c)
      a.slope(i)[c] = scale * z.normal(0, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
  return a;
}

double terminal(const flow::ControlledFlowResult& r) { return r.x(r.x.nodes() - 1, 0); }

}  // namespace

TEST_CASE("closed-form constant coefficients") {
  const TimeGrid g(1.0, 10);
  const auto model = ConstantModel::scalar(0.3, 1.0);
  const std::vector<double> x0{0.5};
  CHECK(terminal(flow::integrate(*model, x0, ControlPath(g, 1))) == doctest::Approx(0.8));

  const auto unit = ConstantModel::scalar(1.0, 2.0);
  const double half = 0.5;
  const auto r = flow::integrate(*unit, x0, ControlPath::constant(g, {&half, 1}));
  CHECK(terminal(r) == doctest::Approx(2.5));
  CHECK(r.omega(10, 0) == doctest::Approx(0.5));
  CHECK(r.action == doctest::Approx(0.125));
  for (std::size_t i = 0; i <= 10; ++i) CHECK(r.x(i, 0) == doctest::Approx(0.5 + 2.0 * g.time(i)));
}

TEST_CASE("gradient vanishes at the linear-Gaussian optimum") {
  // xi = lambda x_T, b = 0: optimum alpha = -lambda sigma.
  const TimeGrid g(2.0, 16);
  const auto m = ConstantModel::scalar(0.0, 0.5);
  const ClippedLinear xi({2.0}, kUnbounded);
  const std::vector<double> x0{1.0};
  const double opt = -1.0;
  const auto a = ControlPath::constant(g, {&opt, 1});
  double n2 = 0.0;
  for (double v : flow::gradient(*m, xi, x0, a)) n2 += v * v;
  CHECK(std::sqrt(n2) <= 1e-8);
  CHECK(flow::laplace_objective(*m, xi, x0, a) == doctest::Approx(1.0));
}

TEST_CASE("mean reversion decays") {
  const LinearDriftModel m(1.0, 0.0, 1.0);
  const std::vector<double> x0{1.0};
  double prev_err = 1.0;
  for (std::size_t n : {100, 1000, 10000}) {
    const double err = std::abs(terminal(flow::integrate(m, x0, ControlPath(TimeGrid(1.0, n), 1))) - std::exp(-1.0));
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-4);
}

TEST_CASE("euler convergence is first order") {
  // dx = -x dt + alpha dt with alpha = 1: x_T = 1 + (x0 - 1) e^{-T}.
  const LinearDriftModel m(1.0, 0.0, 1.0);
  const std::vector<double> x0{-0.5};
  const double exact = 1.0 - 1.5 * std::exp(-1.0);
  const double one = 1.0;
  std::vector<double> errs;
  for (std::size_t n : {32, 64, 128, 256}) {
    const TimeGrid g(1.0, n);
    errs.push_back(std::abs(terminal(flow::integrate(m, x0, ControlPath::constant(g, {&one, 1}))) - exact));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = errs[i] / errs[i - 1];
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
  }
}

TEST_CASE("constant payoff gradient is the action gradient") {
  const TimeGrid g(1.0, 12);
  const ScalarVolModel m(running_max_vol(0.3, 0.1));
  const ConstantPayoff xi(2.0);
  const std::vector<double> x0{0.1};
  const auto a = random_control(g, 1, 3);
  for (auto scheme : {flow::GradientScheme::automatic, flow::GradientScheme::central_fd}) {
    const auto grad = flow::gradient(m, xi, x0, a, scheme);
    for (std::size_t i = 0; i < g.steps(); ++i)
      CHECK(grad[i] == doctest::Approx(a.slope(i)[0] * g.dt()).epsilon(1e-6));
  }
  CHECK(flow::laplace_objective(m, xi, x0, a) == doctest::Approx(2.0 + a.action()));
}

TEST_CASE("forward sensitivities match finite differences") {
  const TimeGrid g(1.0, 16);
  const std::vector<double> x0{0.2};
  const ScalarVolModel rmv(running_max_vol(0.3, 0.1), 0.05);
  const ScalarVolModel dv(delay_vol(0.25, 0.1, 0.125));
  const LogPriceModel lp(local_vol(0.2, 0.1));
  const ClippedLinear lin({0.8}, kUnbounded);
  const RunningMaxPayoff rm(0.5, 10.0);
  for (const CoefficientModel* m : std::initializer_list<const CoefficientModel*>{&rmv, &dv, &lp}) {
    for (const TerminalFunctional* xi : std::initializer_list<const TerminalFunctional*>{&lin, &rm}) {
      INFO(m->kind(), " ", xi->kind());
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto a = random_control(g, 1, 10 + s, 2.0);
        const auto fs = flow::gradient(*m, *xi, x0, a, flow::GradientScheme::forward_sensitivity);
        const auto fd = flow::gradient(*m, *xi, x0, a, flow::GradientScheme::central_fd);
        double diff = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i) diff = std::max(diff, std::abs(fs[i] - fd[i]));
        CHECK(diff <= 1e-6);
      }
    }
  }
}

TEST_CASE("two-dimensional sensitivities") {
  const TimeGrid g(1.0, 8);
  const ConstantModel m({0.1, -0.2}, {1.0, 0.3, -0.4, 0.7}, 2);
  const ClippedLinear xi({0.6, -0.8}, kUnbounded);
  const std::vector<double> x0{0.0, 1.0};
  const auto a = random_control(g, 2, 4);
  const auto fs = flow::gradient(m, xi, x0, a, flow::GradientScheme::forward_sensitivity);
  const auto fd = flow::gradient(m, xi, x0, a, flow::GradientScheme::central_fd);
  REQUIRE(fs.size() == 16);
  for (std::size_t i = 0; i < fs.size(); ++i) CHECK(fs[i] == doctest::Approx(fd[i]).epsilon(1e-6));
}

TEST_CASE("shifted flow continues the full flow") {
  const TimeGrid g(1.0, 20);
  const ScalarVolModel m(running_max_vol(0.3, 0.1), 0.1);
  const std::vector<double> x0{0.3};
  const auto a = random_control(g, 1, 8);
  const auto full = flow::integrate(m, x0, a);
  const std::size_t k = 7;
  const auto start = PathPoint::join(k, full.omega, full.x);
  const TimeGrid tail = g.tail_from(k);
  ControlPath rest(tail, 1);
  for (std::size_t i = 0; i < tail.steps(); ++i) rest.slope(i)[0] = a.slope(k + i)[0];
  const auto shifted = flow::integrate_from(m, start, rest);
  for (std::size_t i = 0; i <= g.steps(); ++i) {
    CHECK(shifted.x(i, 0) == doctest::Approx(full.x(i, 0)).epsilon(1e-13));
    CHECK(shifted.omega(i, 0) == doctest::Approx(full.omega(i, 0)).epsilon(1e-13));
  }
  const ClippedLinear xi({1.0}, kUnbounded);
  CHECK(flow::laplace_objective_from(m, xi, start, rest) ==
        doctest::Approx(terminal(full) + rest.action()));

  const auto vg = flow::value_and_gradient_from(m, xi, start, rest);
  const auto fd = flow::gradient_from(m, xi, start, rest, flow::GradientScheme::central_fd);
  CHECK(vg.value == doctest::Approx(terminal(full) + rest.action()));
  for (std::size_t i = 0; i < fd.size(); ++i) CHECK(vg.gradient[i] == doctest::Approx(fd[i]).epsilon(1e-6));
}

TEST_CASE("flow depends Lipschitz-continuously on the control") {
  // With b Lipschitz in x (constant L) and unit sigma, Gronwall gives
  // sup |x^a - x^b| <= e^{L T} int |a - b|.
  const TimeGrid g(1.0, 50);
  const LinearDriftModel m(1.0, 0.0, 1.0);
  const std::vector<double> x0{0.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = random_control(g, 1, 2 * s);
    const auto b = random_control(g, 1, 2 * s + 1);
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.steps(); ++i) l1 += std::abs(a.slope(i)[0] - b.slope(i)[0]) * g.dt();
    const auto xa = flow::integrate(m, x0, a), xb = flow::integrate(m, x0, b);
    double sup = 0.0;
    for (std::size_t i = 0; i <= g.steps(); ++i) sup = std::max(sup, std::abs(xa.x(i, 0) - xb.x(i, 0)));
    CHECK(sup <= std::exp(1.0) * l1 + 1e-12);
  }
}

TEST_CASE("origin point") {
  const ScalarVolModel m(constant_vol(0.2));
  const std::vector<double> x0{0.4};
  const auto p = flow::origin_point(m, x0, TimeGrid(1.0, 4));
  CHECK(p.node == 0);
  CHECK(p.path.dim() == 2);
  CHECK(p.path(0, 0) == 0.0);
  CHECK(p.path(0, 1) == 0.4);
}
