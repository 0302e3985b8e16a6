#include "ldplab/smile.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ldplab/error.hpp"
#include "ldplab/rng.hpp"

namespace ldplab::smile {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kVarLo = 1e-14;
constexpr double kVarHi = 200.0;

double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_pdf(double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi); }

// 1 - x R(x) with R the Mills ratio Q(x) / phi(x). Past x = 25 the
// asymptotic series sum_{n>=1} (-1)^{n+1} (2n-1)!! / x^{2n} is used.
double one_minus_x_mills(double x) {
  if (x <= 25.0) return 1.0 - x * upper_tail(x) / std::exp(log_pdf(x));
  const double inv = 1.0 / (x * x);
  double term = inv, sum = 0.0;
  for (int n = 1; n <= 10; ++n) {
    sum += term;
    term *= -(2.0 * n + 1.0) * inv;
  }
  return sum;
}

// ln c(kappa, v) for kappa >= 0 via c = phi(a) (R(a) - R(b)),
// a = kappa/sqrt(v) - sqrt(v)/2, b = a + sqrt(v).
double log_otm_call(double kappa, double v) {
  const double s = std::sqrt(v);
  const double a = kappa / s - 0.5 * s;
  const double b = a + s;
  if (a < -1.0) return std::log(upper_tail(a) - std::exp(kappa) * upper_tail(b));
  const auto panels = static_cast<int>(std::max(1.0, std::ceil(b - a)));
  const double width = (b - a) / panels;
  double integral = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    integral += boost::math::quadrature::gauss<double, 20>::integrate(one_minus_x_mills, lo,
                                                                      lo + width);
  }
  return log_pdf(a) + std::log(integral);
}

double intrinsic(double k) { return std::max(0.0, -std::expm1(k)); }

}  // namespace

double log_time_value(double k, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("log_time_value: need v > 0");
  return std::min(k, 0.0) + log_otm_call(std::abs(k), v);
}

double bs_price(double k, double v) {
  if (v < 0.0) throw std::invalid_argument("bs_price: negative total variance");
  if (v == 0.0) return intrinsic(k);
  return intrinsic(k) + std::exp(log_time_value(k, v));
}

double log_bs_price(double k, double v) {
  if (v < 0.0) throw std::invalid_argument("log_bs_price: negative total variance");
  if (k >= 0.0) return v == 0.0 ? kNegInf : log_time_value(k, v);
  const double base = std::log(intrinsic(k));
  if (v == 0.0) return base;
  return base + std::log1p(std::exp(log_time_value(k, v) - base));
}

double implied_total_variance_from_log_time_value(double log_tv, double k) {
  double lo = kVarLo, hi = kVarHi;
  if (log_tv <= log_time_value(k, lo)) return lo;
  if (log_tv > log_time_value(k, hi))
    throw NumericalError("implied_total_variance: price needs total variance above 200");
  for (int i = 0; i < 200 && hi / lo - 1.0 > 1e-15; ++i) {
    const double mid = std::sqrt(lo * hi);
    (log_time_value(k, mid) < log_tv ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double implied_total_variance(double c, double k) {
  const double floor = intrinsic(k);
  if (!(c > floor && c < 1.0))
    throw std::invalid_argument("implied_total_variance: price outside (max(0, 1 - e^k), 1)");
  return implied_total_variance_from_log_time_value(std::log(c - floor), k);
}

std::vector<SmallVRow> small_v_identity_check(double k, const std::vector<double>& v_schedule) {
  if (!(k > 0.0)) throw std::invalid_argument("small_v_identity_check: need k > 0");
  std::vector<SmallVRow> rows;
  for (std::size_t i = 0; i < v_schedule.size(); ++i) {
    const double v = v_schedule[i];
    if (!(v > 0.0) || (i > 0 && !(v < v_schedule[i - 1])))
      throw std::invalid_argument("small_v_identity_check: schedule must be positive, decreasing");
    const double vl = v * log_bs_price(k, v);
    rows.push_back({v, vl, vl + 0.5 * k * k});
  }
  return rows;
}

SmileAsymptote q0_of_strike(const VolPtr& vol, double k, const std::vector<double>& a_schedule,
                            const SmileOptions& opts) {
  if (!vol) throw std::invalid_argument("q0_of_strike: null volatility");
  if (!(k > 0.0)) throw std::invalid_argument("q0_of_strike: need k > 0");
  if (opts.grid.horizon() != 1.0) throw std::invalid_argument("q0_of_strike: horizon must be 1");
  if (a_schedule.empty()) throw std::invalid_argument("q0_of_strike: empty a schedule");
  for (std::size_t i = 0; i < a_schedule.size(); ++i)
    if (!(a_schedule[i] < 0.0) || (i > 0 && !(a_schedule[i] < a_schedule[i - 1])))
      throw std::invalid_argument("q0_of_strike: a schedule must be negative and decreasing");

  // Limit flow: b^0 = 0.
  const ScalarVolModel model(vol, 0.0);
  const double x0[] = {0.0};
  SmileAsymptote out;
  out.k = k;
  for (const double a : a_schedule) {
    const Interval domain(a, k);
    const double q = rate::exit_rate(model, domain, x0, opts.grid, opts.exit).rate.value;
    out.trace.emplace_back(a, q);
    if (out.trace.size() >= 2 &&
        std::abs(q - out.trace[out.trace.size() - 2].second) < opts.stabilization) {
      out.Q0 = q;
      out.a_used = a;
      out.Sigma0_sq = k * k / (2.0 * q);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "q0_of_strike: Q0(a, k) did not stabilize; trace";
  for (const auto& [a, q] : out.trace) msg << " (" << a << ", " << q << ")";
  throw NumericalError(msg.str());
}

TimeIndifferenceReport time_indifference_check(const VolFunctional& vol, std::size_t trials,
                                               std::uint64_t seed) {
  const CounterNormals draws(seed);
  constexpr std::size_t N = 16;
  TimeIndifferenceReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto u = [&](std::uint32_t lane) { return draws.uniform(t, 0, lane); };
    const double horizon = 0.5 + 1.5 * u(0);
    const double c = std::exp(std::log(0.25) + std::log(16.0) * u(1));
    const auto node = std::min<std::size_t>(N, static_cast<std::size_t>(u(2) * (N + 1)));
    DiscretePath x(TimeGrid(horizon, N), 1);
    for (std::size_t i = 1; i <= N; ++i)
      x(i, 0) = x(i - 1, 0) + 0.3 * draws.normal(t, static_cast<std::uint32_t>(i), 0);
    const DiscretePath stretched(TimeGrid(horizon / c, N), 1,
                                 std::vector<double>(x.values().begin(), x.values().end()));
    const double lhs = vol.value(node, x);
    const double rhs = vol.value(node, stretched);
    if (std::abs(lhs - rhs) > 1e-12) {
      std::ostringstream msg;
      msg << "trial " << t << ": c = " << c << ", node " << node << ": " << lhs << " vs " << rhs;
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

std::vector<mc::ConvergenceRow> mc_call_rate(const VolPtr& vol, double k,
                                             const std::vector<double>& eps_schedule,
                                             const mc::McConfig& cfg, double limit) {
  if (!(k > 0.0)) throw std::invalid_argument("mc_call_rate: need k > 0");
  if (cfg.grid.horizon() != 1.0) throw std::invalid_argument("mc_call_rate: horizon must be 1");
  const LogPriceModel model(vol);
  const double x0[] = {0.0};
  return mc::convergence_study(eps_schedule, limit, [&](double eps) {
    mc::McConfig c = cfg;
    c.epsilon = eps;
    c.is_control.reset();
    const auto logs = mc::map_paths(model, x0, c, [&](const DiscretePath&, const DiscretePath& x) {
      return ClippedCall::log_payoff(x(x.nodes() - 1, 0), k);
    });
    const auto m = mc::reduce_log_values(logs);
    if (m.log_mean == kNegInf)
      throw NumericalError("mc_call_rate: every payoff is zero; increase epsilon");
    return mc::log_mean_estimate(m, eps);
  });
}

}  // namespace ldplab::smile
