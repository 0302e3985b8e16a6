#include <cmath>
#include <vector>

#include "doctest.h"
#include "ldplab/eikonal.hpp"
#include "ldplab/flow.hpp"
#include "ldplab/rng.hpp"
#include "oracles.hpp"

using namespace ldplab;

namespace {

// (omega, x) straight lines from (0, x0) with the given slopes.
PathPoint linear_point(const TimeGrid& g, std::size_t node, double x0, double w_slope, double x_slope) {
  DiscretePath w(g, 1), x(g, 1);
  for (std::size_t i = 0; i < w.nodes(); ++i) {
    w(i, 0) = w_slope * g.time(i);
    x(i, 0) = x0 + x_slope * g.time(i);
  }
  return PathPoint::join(node, w, x);
}

PathPoint random_point(const TimeGrid& g, std::size_t node, std::uint64_t seed) {
  const CounterNormals z(seed);
  DiscretePath w(g, 1), x(g, 1);
  const double s = std::sqrt(g.dt());
  for (std::size_t i = 1; i < w.nodes(); ++i) {
    w(i, 0) = w(i - 1, 0) + s * z.normal(0, static_cast<std::uint32_t>(i), 0);
    x(i, 0) = x(i - 1, 0) + 0.3 * s * z.normal(0, static_cast<std::uint32_t>(i), 1);
  }
  return PathPoint::join(node, w, x);
}

}  // namespace

TEST_CASE("hamiltonian closed forms") {
  const std::vector<double> b{2.0}, sigma{1.0}, pw{0.5}, px{1.0}, zero{0.0};
  CHECK(eikonal::hamiltonian(b, sigma, zero, zero, 3.0).value == 0.0);
  const auto wide = eikonal::hamiltonian(b, sigma, pw, px, 3.0);
  CHECK(wide.value == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(wide.minimizer[0] == doctest::Approx(-1.5));
  const auto narrow = eikonal::hamiltonian(b, sigma, pw, px, 1.0);
  CHECK(narrow.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(narrow.minimizer[0] == doctest::Approx(-1.0));
  CHECK(eikonal::hamiltonian(b, sigma, pw, px, 1.5).value == doctest::Approx(0.875).epsilon(1e-14));

  // Brute force over the constraint set.
  CHECK(wide.value - 2.0 == doctest::Approx(oracle::brute_force_inf({1.5}, 3.0)).epsilon(1e-6));
  CHECK(narrow.value - 2.0 == doctest::Approx(oracle::brute_force_inf({1.5}, 1.0)).epsilon(1e-6));
}

TEST_CASE("hamiltonian matches brute force in two dimensions") {
  const CounterNormals z(17);
  for (std::uint32_t t = 0; t < 20; ++t) {
    const std::vector<double> b{z.normal(0, t, 0), z.normal(0, t, 1)};
    const std::vector<double> sigma{z.normal(1, t, 0), z.normal(1, t, 1), z.normal(1, t, 2), z.normal(1, t, 3)};
    const std::vector<double> pw{z.normal(2, t, 0), z.normal(2, t, 1)};
    const std::vector<double> px{z.normal(3, t, 0), z.normal(3, t, 1)};
    const double K0 = 0.25 + 2.0 * z.uniform(4, t, 0);
    const std::vector<double> q{pw[0] + sigma[0] * px[0] + sigma[2] * px[1],
                                pw[1] + sigma[1] * px[0] + sigma[3] * px[1]};
    const double expected = b[0] * px[0] + b[1] * px[1] + oracle::brute_force_inf(q, K0);
    CHECK(eikonal::hamiltonian(b, sigma, pw, px, K0).value == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("truncation limit") {
  const auto m = ConstantModel::scalar(2.0, 1.0);
  const TimeGrid g(1.0, 8);
  const auto theta = linear_point(g, 3, 0.0, 0.0, 0.0);
  const std::vector<double> pw{0.5}, px{1.0};
  const auto r = eikonal::hamiltonian_limit_check(*m, theta, pw, px, {0.5, 1.0, 2.0, 4.0});
  CHECK(r.ok());
  CHECK(r.q_norm == doctest::Approx(1.5));
  CHECK(r.unclamped == doctest::Approx(0.875));
  CHECK(r.values[0] > r.unclamped);
  CHECK(r.values[1] > r.unclamped);
  CHECK(r.values[2] == r.unclamped);
  CHECK(r.values[3] == r.unclamped);

  const std::vector<std::shared_ptr<CoefficientModel>> models{
      std::make_shared<ScalarVolModel>(running_max_vol(0.3, 0.1), 0.2),
      std::make_shared<LinearDriftModel>(1.0, 0.5, 0.7),
      std::make_shared<LogPriceModel>(local_vol(0.2, 0.1))};
  const CounterNormals z(3);
  for (const auto& model : models) {
    for (std::uint32_t t = 0; t < 20; ++t) {
      const auto th = random_point(g, t % 9, t);
      const std::vector<double> a{3.0 * z.normal(0, t, 0)}, c{3.0 * z.normal(0, t, 1)};
      INFO(model->kind());
      CHECK(eikonal::hamiltonian_limit_check(*model, th, a, c, eikonal::default_K_grid()).ok());
    }
  }
}

TEST_CASE("value function closed forms") {
  const auto m = ConstantModel::scalar(0.0, 1.0);
  const ClippedLinear xi({1.0}, 10.0);
  const TimeGrid g(1.0, 32);
  const auto at_end = linear_point(g, 32, 0.0, 0.3, 0.7);
  CHECK(eikonal::value_function(*m, xi, at_end).value == doctest::Approx(0.7));
  // x_t = 0.3 at t = 0.5: u = 0.3 - 0.5^2... = 0.3 - 0.25.
  const auto mid = linear_point(g, 16, 0.0, 0.0, 0.6);
  const auto u = eikonal::value_function(*m, xi, mid);
  CHECK(u.value == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(u.sup_control == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(u.control.size() == 16);
}

TEST_CASE("value function is nondecreasing along flat extensions") {
  const ScalarVolModel m(running_max_vol(0.3, 0.1));
  const RunningMaxPayoff xi(-1.0, 2.0);
  const TimeGrid g(1.0, 32);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto theta = random_point(g, 8, s);
    const auto inc = eikonal::time_increment(m, xi, theta, 4);
    CHECK(inc.u_t <= inc.u_t_plus_h + 1e-9);
    CHECK(inc.u_t_plus_h - inc.u_t <= inc.bound + 1e-9);
    CHECK(std::abs(inc.u_t) <= xi.bound() + 1e-12);
  }
}

TEST_CASE("dynamic programming residual") {
  const auto m = ConstantModel::scalar(0.0, 1.0);
  const ClippedLinear xi({0.7}, 10.0);
  const TimeGrid g(1.0, 64);
  const auto theta = linear_point(g, 16, 0.2, 0.0, 0.0);
  CHECK(eikonal::dp_residual(*m, xi, theta, 16, eikonal::control_levels(-2, 2, 5)) == 0.0);
  const double coarse = eikonal::dp_residual(*m, xi, theta, 18, eikonal::control_levels(-2, 2, 5));
  const double fine = eikonal::dp_residual(*m, xi, theta, 18, eikonal::control_levels(-2, 2, 9));
  CHECK(coarse <= 2e-2);
  CHECK(fine < coarse);
  CHECK_THROWS_AS(eikonal::control_levels(1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("clamp level search") {
  const auto m = ConstantModel::scalar(0.0, 1.0);
  const TimeGrid g(1.0, 32);
  const auto theta = linear_point(g, 8, 0.0, 0.0, 0.0);
  const auto lin = eikonal::clamp_level_search(*m, ClippedLinear({1.0}, 10.0), theta, eikonal::default_K_grid());
  CHECK(lin.K0 == 1.0);
  CHECK(lin.max_sup_control == doctest::Approx(1.0).epsilon(1e-6));
  const auto flat = eikonal::clamp_level_search(*m, ConstantPayoff(1.0), theta, eikonal::default_K_grid());
  CHECK(flat.K0 == eikonal::default_K_grid().front());

  const ScalarVolModel rmv(running_max_vol(0.3, 0.1));
  const auto rm = eikonal::clamp_level_search(rmv, RunningMaxPayoff(-1.0, 2.0), theta, eikonal::default_K_grid());
  CHECK(rm.K0 < 32.0);
}

TEST_CASE("viscosity residual on the linear case") {
  const auto m = ConstantModel::scalar(0.0, 1.0);
  const ClippedLinear xi({1.0}, 10.0);
  const TimeGrid g(1.0, 512);
  const auto slopes = eikonal::default_probe_slopes(2);
  CHECK(slopes.size() == 5);
  for (std::size_t node : {256u, 508u}) {
    const auto theta = linear_point(g, node, 0.0, 0.3, 0.3);
    const auto coarse = eikonal::viscosity_residual(*m, xi, theta, 2, slopes, eikonal::default_K_grid());
    const auto fine = eikonal::viscosity_residual(*m, xi, theta, 1, slopes, eikonal::default_K_grid());
    INFO(node);
    CHECK(std::abs(coarse.residual) <= 0.05);
    CHECK(std::abs(fine.residual) <= 0.75 * std::abs(coarse.residual) + 1e-9);
    CHECK(coarse.du_dt == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(coarse.du_domega[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(coarse.du_dx[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(coarse.K0 == 1.0);
    CHECK(coarse.K == doctest::Approx(2.0));
  }
}

TEST_CASE("value function is Lipschitz in the frozen state") {
  // With b = 0, sigma = 1 and xi = lambda x_T clipped, |u(x) - u(x')| <= |lambda| |x - x'|.
  const auto m = ConstantModel::scalar(0.0, 1.0);
  const ClippedLinear xi({0.8}, 0.5);
  const TimeGrid g(1.0, 16);
  for (double shift : {0.1, 0.3}) {
    const auto a = linear_point(g, 8, 0.0, 0.0, 0.2);
    const auto b = linear_point(g, 8, shift, 0.0, 0.2);
    const double ua = eikonal::value_function(*m, xi, a).value;
    const double ub = eikonal::value_function(*m, xi, b).value;
    CHECK(std::abs(ua - ub) <= 0.8 * shift + 1e-8);
  }
}
