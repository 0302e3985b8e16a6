#include "ldplab/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ldplab/error.hpp"

namespace ldplab::flow {

namespace {

void check_start(const CoefficientModel& model, const PathPoint& start,
                 const ControlPath& alpha) {
  const std::size_t d = model.noise_dim();
  if (start.path.dim() != d + model.state_dim())
    throw std::invalid_argument("integrate: start path must have dimension d + n");
  if (alpha.dim() != d) throw std::invalid_argument("integrate: control dimension != noise_dim");
  const TimeGrid& g = start.path.grid();
  if (start.node >= g.steps() || !alpha.grid().compatible_with(g.tail_from(start.node)))
    throw std::invalid_argument("integrate: control grid does not match the remaining horizon");
}

// Euler sweep; when `sens` is non-null also propagates dx_k/dalpha
// (node-major, n x P per node, P = tail steps * d).
ControlledFlowResult sweep(const CoefficientModel& model, const PathPoint& start,
                           const ControlPath& alpha, std::vector<double>* sens) {
  check_start(model, start, alpha);
  const std::size_t d = model.noise_dim();
  const std::size_t n = model.state_dim();
  const std::size_t i0 = start.node;
  const TimeGrid& grid = start.path.grid();
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  const std::size_t P = alpha.steps() * d;

  ControlledFlowResult r{start.omega_part(d), start.state_part(d), alpha.action(), std::nullopt};
  DiscretePath& omega = r.omega;
  DiscretePath& x = r.x;
  // Values after the start are recomputed; flatten them so nothing stale is visible.
  for (std::size_t i = i0 + 1; i <= N; ++i) {
    for (std::size_t c = 0; c < d; ++c) omega(i, c) = omega(i0, c);
    for (std::size_t c = 0; c < n; ++c) x(i, c) = x(i0, c);
  }

  if (sens) sens->assign((N + 1) * n * P, 0.0);
  std::vector<double> b(n), sigma(n * d);
  std::vector<CoefficientPartial> parts;

  for (std::size_t k = i0; k < N; ++k) {
    const auto a = alpha.slope(k - i0);
    model.drift(k, omega, x, b);
    model.diffusion(k, omega, x, sigma);
    for (std::size_t c = 0; c < d; ++c) omega(k + 1, c) = omega(k, c) + a[c] * dt;
    for (std::size_t row = 0; row < n; ++row) {
      double v = b[row];
      for (std::size_t q = 0; q < d; ++q) v += sigma[row * d + q] * a[q];
      x(k + 1, row) = x(k, row) + v * dt;
      if (!std::isfinite(x(k + 1, row)))
        throw NumericalError("flow: non-finite state at step " + std::to_string(k));
    }
    if (!sens) continue;

    double* next = sens->data() + (k + 1) * n * P;
    const double* cur = sens->data() + k * n * P;
    const std::size_t active = (k - i0 + 1) * d;
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t p = 0; p < active; ++p) next[row * P + p] = cur[row * P + p];
      for (std::size_t q = 0; q < d; ++q) next[row * P + (k - i0) * d + q] += sigma[row * d + q] * dt;
    }
    parts.clear();
    model.partials(k, omega, x, parts);
    for (const auto& e : parts) {
      if (e.node <= i0) continue;  // frozen prefix
      for (std::size_t row = 0; row < n; ++row) {
        double coef = e.drift[row];
        for (std::size_t q = 0; q < d; ++q) coef += e.diffusion[row * d + q] * a[q];
        if (coef == 0.0) continue;
        coef *= dt;
        if (e.side == PathSide::state) {
          const double* src = sens->data() + e.node * n * P + e.component * P;
          for (std::size_t p = 0; p < active; ++p) next[row * P + p] += coef * src[p];
        } else {
          // d omega_l / d alpha_{m, c} = dt for the steps m before l.
          for (std::size_t m = 0; m < e.node - i0; ++m)
            next[row * P + m * d + e.component] += coef * dt;
        }
      }
    }
  }
  return r;
}

ValueAndGradient central_fd(const CoefficientModel& model, const TerminalFunctional& xi,
                            const PathPoint& start, const ControlPath& alpha) {
  ValueAndGradient out{laplace_objective_from(model, xi, start, alpha), {}};
  const auto slopes = alpha.slopes();
  out.gradient.resize(slopes.size());
  ControlPath probe = alpha;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(slopes[i]));
    probe.slopes()[i] = slopes[i] + h;
    const double up = laplace_objective_from(model, xi, start, probe);
    probe.slopes()[i] = slopes[i] - h;
    const double down = laplace_objective_from(model, xi, start, probe);
    probe.slopes()[i] = slopes[i];
    out.gradient[i] = (up - down) / (2.0 * h);
  }
  return out;
}

ValueAndGradient sensitivities(const CoefficientModel& model, const TerminalFunctional& xi,
                               const PathPoint& start, const ControlPath& alpha) {
  std::vector<double> sens;
  const auto r = sweep(model, start, alpha, &sens);
  const std::size_t d = model.noise_dim();
  const std::size_t n = model.state_dim();
  const std::size_t i0 = start.node;
  const double dt = alpha.grid().dt();
  const std::size_t P = alpha.steps() * d;

  ValueAndGradient out{xi.value(r.omega, r.x) + r.action, std::vector<double>(P)};
  const auto slopes = alpha.slopes();
  for (std::size_t p = 0; p < P; ++p) out.gradient[p] = slopes[p] * dt;
  std::vector<PathSensitivity> grads;
  xi.gradient(r.omega, r.x, grads);
  for (const auto& g : grads) {
    if (g.node <= i0) continue;
    if (g.side == PathSide::state) {
      const double* src = sens.data() + g.node * n * P + g.component * P;
      for (std::size_t p = 0; p < P; ++p) out.gradient[p] += g.value * src[p];
    } else {
      for (std::size_t m = 0; m < g.node - i0; ++m) out.gradient[m * d + g.component] += g.value * dt;
    }
  }
  return out;
}

}  // namespace

PathPoint origin_point(const CoefficientModel& model, std::span<const double> x0,
                       const TimeGrid& grid) {
  if (x0.size() != model.state_dim())
    throw std::invalid_argument("integrate: x0 dimension != state_dim");
  DiscretePath omega(grid, model.noise_dim());
  DiscretePath x(grid, model.state_dim());
  for (std::size_t c = 0; c < x0.size(); ++c) x(0, c) = x0[c];
  return PathPoint::join(0, omega, x);
}

ControlledFlowResult integrate(const CoefficientModel& model, std::span<const double> x0,
                               const ControlPath& alpha) {
  return sweep(model, origin_point(model, x0, alpha.grid()), alpha, nullptr);
}

ControlledFlowResult integrate_from(const CoefficientModel& model, const PathPoint& start,
                                    const ControlPath& alpha) {
  return sweep(model, start, alpha, nullptr);
}

double laplace_objective(const CoefficientModel& model, const TerminalFunctional& xi,
                         std::span<const double> x0, const ControlPath& alpha) {
  return laplace_objective_from(model, xi, origin_point(model, x0, alpha.grid()), alpha);
}

double laplace_objective_from(const CoefficientModel& model, const TerminalFunctional& xi,
                              const PathPoint& start, const ControlPath& alpha) {
  const auto r = sweep(model, start, alpha, nullptr);
  return xi.value(r.omega, r.x) + r.action;
}

ValueAndGradient value_and_gradient_from(const CoefficientModel& model,
                                         const TerminalFunctional& xi, const PathPoint& start,
                                         const ControlPath& alpha, GradientScheme scheme) {
  const bool exact = model.has_partials() && xi.has_gradient();
  if (scheme == GradientScheme::automatic)
    scheme = exact ? GradientScheme::forward_sensitivity : GradientScheme::central_fd;
  if (scheme == GradientScheme::forward_sensitivity && !exact)
    throw std::invalid_argument("gradient: forward sensitivities need closed-form partials");
  auto out = scheme == GradientScheme::forward_sensitivity
                 ? sensitivities(model, xi, start, alpha)
                 : central_fd(model, xi, start, alpha);
  for (std::size_t i = 0; i < out.gradient.size(); ++i)
    if (!std::isfinite(out.gradient[i]))
      throw NumericalError("gradient: non-finite component " + std::to_string(i));
  return out;
}

std::vector<double> gradient(const CoefficientModel& model, const TerminalFunctional& xi,
                             std::span<const double> x0, const ControlPath& alpha,
                             GradientScheme scheme) {
  return gradient_from(model, xi, origin_point(model, x0, alpha.grid()), alpha, scheme);
}

std::vector<double> gradient_from(const CoefficientModel& model, const TerminalFunctional& xi,
                                  const PathPoint& start, const ControlPath& alpha,
                                  GradientScheme scheme) {
  return value_and_gradient_from(model, xi, start, alpha, scheme).gradient;
}

}  // namespace ldplab::flow
