#include "ldplab/montecarlo.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldplab/error.hpp"
#include "ldplab/parallel.hpp"
#include "ldplab/rng.hpp"

namespace ldplab::mc {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate(const CoefficientModel& model, std::span<const double> x0, const McConfig& cfg,
              bool allow_zero_eps) {
  if (!(cfg.epsilon > 0.0) && !(allow_zero_eps && cfg.epsilon == 0.0))
    throw std::invalid_argument("mc: epsilon must be positive");
  if (cfg.n_paths < 2) throw std::invalid_argument("mc: need at least 2 paths");
  if (cfg.antithetic && cfg.n_paths % 2 != 0)
    throw std::invalid_argument("mc: antithetic sampling needs an even path count");
  if (x0.size() != model.state_dim()) throw std::invalid_argument("mc: x0 dimension != state_dim");
  if (cfg.is_control &&
      (!cfg.is_control->grid().compatible_with(cfg.grid) ||
       cfg.is_control->dim() != model.noise_dim()))
    throw std::invalid_argument("mc: importance-sampling control on a different grid");
}

// Simulates path p into (omega, x) and returns ln M^{eps,alpha}_T (0 without
// a sampling drift).
double simulate_one(const CoefficientModel& model, std::span<const double> x0,
                    const McConfig& cfg, const CounterNormals& normals, std::size_t p,
                    DiscretePath& omega, DiscretePath& x) {
  const std::size_t d = model.noise_dim();
  const std::size_t n = model.state_dim();
  const double dt = cfg.grid.dt();
  const double scale = std::sqrt(cfg.epsilon * dt);
  const std::uint64_t stream = cfg.antithetic ? p / 2 : p;
  const double sign = (cfg.antithetic && p % 2 == 1) ? -1.0 : 1.0;
  const ControlPath* alpha = cfg.is_control ? &*cfg.is_control : nullptr;

  std::vector<double> b(n), sigma(n * d), db(d);
  for (std::size_t c = 0; c < d; ++c) omega(0, c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) x(0, c) = x0[c];
  double log_m = 0.0;
  for (std::size_t k = 0; k < cfg.grid.steps(); ++k) {
    model.drift_eps(cfg.epsilon, k, omega, x, b);
    model.diffusion(k, omega, x, sigma);
    for (std::size_t c = 0; c < d; ++c) {
      db[c] = sign * scale *
              normals.normal(stream, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(c));
      if (alpha) {
        const double a = alpha->slope(k)[c];
        db[c] += a * dt;
        log_m += (a * db[c] - 0.5 * a * a * dt) / cfg.epsilon;
      }
      omega(k + 1, c) = omega(k, c) + db[c];
    }
    for (std::size_t row = 0; row < n; ++row) {
      double v = x(k, row) + b[row] * dt;
      for (std::size_t q = 0; q < d; ++q) v += sigma[row * d + q] * db[q];
      if (!std::isfinite(v))
        throw NumericalError("mc: non-finite state on path " + std::to_string(p) + " at step " +
                             std::to_string(k));
      x(k + 1, row) = v;
    }
  }
  return log_m;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Antithetic pairs are the independent units: average them first.
std::vector<double> pair_up(const std::vector<double>& v, bool antithetic) {
  if (!antithetic) return v;
  std::vector<double> out(v.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = log_add(v[2 * i], v[2 * i + 1]) - std::log(2.0);
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

// Kish effective sample size of the weights exp(lw).
double kish(std::span<const double> lw) {
  const double top = *std::max_element(lw.begin(), lw.end());
  double s1 = 0.0, s2 = 0.0;
  for (double l : lw) {
    const double w = std::exp(l - top);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

IsEstimate laplace_impl(const CoefficientModel& model, const TerminalFunctional& xi,
                        std::span<const double> x0, const McConfig& cfg) {
  validate(model, x0, cfg, false);
  const CounterNormals normals(cfg.seed);
  std::vector<double> log_integrand(cfg.n_paths), log_weight(cfg.n_paths), payoff(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
    DiscretePath omega(cfg.grid, model.noise_dim());
    DiscretePath x(cfg.grid, model.state_dim());
    const double log_m = simulate_one(model, x0, cfg, normals, p, omega, x);
    payoff[p] = xi.value(omega, x);
    log_weight[p] = -log_m;
    log_integrand[p] = -payoff[p] / cfg.epsilon - log_m;
  });

  const LogMean lm = reduce_log_values(pair_up(log_integrand, cfg.antithetic));
  IsEstimate out;
  out.estimate = log_mean_estimate(lm, cfg.epsilon);
  out.estimate.n_effective = kish(log_weight);
  if (cfg.is_control) {
    const double mw = mean_of(log_weight);
    const double vw = variance_of(log_weight, mw);
    out.estimate.log_weights = std::make_pair(mw, vw);
    if (vw > 1e6)
      out.estimate.warnings.push_back("log-weight variance above 1e6: sampling drift is poor");
  }
  std::vector<double> paired = payoff;
  if (cfg.antithetic) {
    paired.resize(payoff.size() / 2);
    for (std::size_t i = 0; i < paired.size(); ++i)
      paired[i] = 0.5 * (payoff[2 * i] + payoff[2 * i + 1]);
  }
  const double mean_xi = mean_of(paired);
  const double action = cfg.is_control ? cfg.is_control->action() : 0.0;
  out.upper_bound = mean_xi + action;
  out.upper_bound_se =
      std::sqrt(variance_of(paired, mean_xi) / static_cast<double>(paired.size()));
  return out;
}

}  // namespace

LogMean reduce_log_values(std::span<const double> lv) {
  if (lv.size() < 2) throw std::invalid_argument("mc: need at least 2 samples");
  const double top = *std::max_element(lv.begin(), lv.end());
  if (top == kNegInf) return {kNegInf, std::numeric_limits<double>::infinity(), kNegInf};
  double s = 0.0;
  for (double l : lv) s += std::exp(l - top);
  const double n = static_cast<double>(lv.size());
  const double mean = s / n;
  double ss = 0.0;
  for (double l : lv) {
    const double dev = std::exp(l - top) - mean;
    ss += dev * dev;
  }
  const double var = ss / (n - 1.0);
  return {top + std::log(mean), std::sqrt(var / n) / mean,
          var > 0.0 ? 2.0 * top + std::log(var) : kNegInf};
}

McEstimate log_mean_estimate(const LogMean& m, double eps) {
  McEstimate e;
  e.value = -eps * m.log_mean;
  e.std_error = eps * m.rel_se;
  e.log_integrand_variance = m.log_variance;
  e.ci_lo = -eps * (m.log_mean + std::log1p(kZ95 * m.rel_se));
  const double low = 1.0 - kZ95 * m.rel_se;
  e.ci_hi = low > 0.0 ? -eps * (m.log_mean + std::log(low)) : std::numeric_limits<double>::infinity();
  return e;
}

std::vector<SimulatedPath> simulate_paths(const CoefficientModel& model,
                                          std::span<const double> x0, const McConfig& cfg) {
  validate(model, x0, cfg, true);
  const CounterNormals normals(cfg.seed);
  std::vector<SimulatedPath> out(cfg.n_paths, {DiscretePath(cfg.grid, model.noise_dim()),
                                               DiscretePath(cfg.grid, model.state_dim())});
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
    simulate_one(model, x0, cfg, normals, p, out[p].noise, out[p].state);
  });
  return out;
}

std::vector<double> map_paths(
    const CoefficientModel& model, std::span<const double> x0, const McConfig& cfg,
    const std::function<double(const DiscretePath& noise, const DiscretePath& state)>& f) {
  validate(model, x0, cfg, true);
  const CounterNormals normals(cfg.seed);
  std::vector<double> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
    DiscretePath omega(cfg.grid, model.noise_dim());
    DiscretePath x(cfg.grid, model.state_dim());
    simulate_one(model, x0, cfg, normals, p, omega, x);
    out[p] = f(omega, x);
  });
  return out;
}

McEstimate laplace_naive(const CoefficientModel& model, const TerminalFunctional& xi,
                         std::span<const double> x0, const McConfig& cfg) {
  McConfig plain = cfg;
  plain.is_control.reset();
  auto est = laplace_impl(model, xi, x0, plain).estimate;
  if (-est.value / cfg.epsilon < std::log(DBL_MIN))
    throw NumericalError(
        "laplace_naive: sample mean of exp(-xi/eps) underflows; use the importance-sampled "
        "estimator");
  return est;
}

IsEstimate laplace_is(const CoefficientModel& model, const TerminalFunctional& xi,
                      std::span<const double> x0, const McConfig& cfg) {
  if (!cfg.is_control) throw std::invalid_argument("laplace_is: is_control is required");
  return laplace_impl(model, xi, x0, cfg);
}

ExitEstimate exit_prob(const CoefficientModel& model, const Domain& domain,
                       std::span<const double> x0, const McConfig& cfg, bool bridge) {
  McConfig plain = cfg;
  plain.is_control.reset();
  validate(model, x0, plain, false);
  if (domain.dim() != model.state_dim())
    throw std::invalid_argument("exit_prob: domain dimension != state_dim");
  if (!domain.inside(x0)) throw std::invalid_argument("exit_prob: x0 must lie in the domain");

  ExitEstimate out;
  const auto sigma = model.constant_scalar_diffusion();
  const auto bounds = domain.interval_bounds();
  out.bridge_used = bridge && sigma && bounds && *sigma != 0.0;
  std::vector<std::string> warnings;
  if (bridge && !out.bridge_used)
    warnings.push_back(
        "bridge correction needs constant scalar sigma on an interval; node detection only, "
        "refine dt");
  const double bridge_scale =
      out.bridge_used ? 2.0 / (cfg.epsilon * *sigma * *sigma * cfg.grid.dt()) : 0.0;

  const CounterNormals normals(cfg.seed);
  std::vector<double> hit(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
    DiscretePath omega(cfg.grid, model.noise_dim());
    DiscretePath x(cfg.grid, model.state_dim());
    simulate_one(model, x0, plain, normals, p, omega, x);
    double survive = 1.0;
    for (std::size_t k = 1; k < x.nodes(); ++k) {
      if (!domain.inside(x.at(k))) {
        hit[p] = 1.0;
        return;
      }
      if (out.bridge_used) {
        const double lo0 = x(k - 1, 0) - bounds->first, lo1 = x(k, 0) - bounds->first;
        const double hi0 = bounds->second - x(k - 1, 0), hi1 = bounds->second - x(k, 0);
        const double p_lo = std::exp(-bridge_scale * lo0 * lo1);
        const double p_hi = std::exp(-bridge_scale * hi0 * hi1);
        survive *= (1.0 - p_lo) * (1.0 - p_hi);
      }
    }
    hit[p] = 1.0 - survive;
  });

  const auto units = [&] {
    if (!cfg.antithetic) return hit;
    std::vector<double> u(hit.size() / 2);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * (hit[2 * i] + hit[2 * i + 1]);
    return u;
  }();
  const double n = static_cast<double>(units.size());
  const double p_hat = mean_of(units);
  if (p_hat == 0.0)
    throw NumericalError("exit_prob: no exits observed; increase epsilon or the path count");

  McEstimate& prob = out.probability;
  prob.value = p_hat;
  prob.std_error = std::sqrt(variance_of(units, p_hat) / n);
  prob.n_effective = n;
  prob.warnings = warnings;
  if (!out.bridge_used && !cfg.antithetic) {
    // Wilson score interval for the binomial proportion.
    const double z2 = kZ95 * kZ95;
    const double centre = (p_hat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half =
        kZ95 * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    prob.ci_lo = std::max(0.0, centre - half);
    prob.ci_hi = std::min(1.0, centre + half);
  } else {
    prob.ci_lo = std::max(0.0, p_hat - kZ95 * prob.std_error);
    prob.ci_hi = std::min(1.0, p_hat + kZ95 * prob.std_error);
  }

  McEstimate& rate = out.rate;
  rate.value = -cfg.epsilon * std::log(p_hat);
  rate.std_error = cfg.epsilon * prob.std_error / p_hat;
  rate.ci_lo = -cfg.epsilon * std::log(prob.ci_hi);
  rate.ci_hi = prob.ci_lo > 0.0 ? -cfg.epsilon * std::log(prob.ci_lo)
                                : std::numeric_limits<double>::infinity();
  rate.n_effective = n;
  rate.warnings = warnings;
  return out;
}

std::vector<ConvergenceRow> convergence_study(
    const std::vector<double>& eps_schedule, double limit,
    const std::function<McEstimate(double eps)>& estimate) {
  if (eps_schedule.empty()) throw std::invalid_argument("convergence_study: empty schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0))
      throw std::invalid_argument("convergence_study: epsilon must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw std::invalid_argument("convergence_study: schedule must be strictly decreasing");
  }
  std::vector<ConvergenceRow> rows;
  for (double eps : eps_schedule) {
    const McEstimate e = estimate(eps);
    rows.push_back({eps, e.value, e.std_error, e.ci_lo, e.ci_hi, limit, std::abs(e.value - limit)});
  }
  return rows;
}

}  // namespace ldplab::mc
