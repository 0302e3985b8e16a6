#include "ldplab/rate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ldplab/error.hpp"
#include "ldplab/parallel.hpp"
#include "ldplab/rng.hpp"

namespace ldplab::rate {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxHalvings = 60;
// Accepted steps that change the objective by less than this (relative)
// count as no progress; a run of them is treated as a stall.
constexpr double kNoProgress = 1e-14;
constexpr int kNoProgressRun = 5;

void project(std::span<double> v, const std::optional<double>& clamp) {
  if (!clamp) return;
  for (double& x : v) x = std::clamp(x, -*clamp, *clamp);
}

// Projected-gradient descent from one start. The descent direction is the
// L^2[0,T] gradient (Euclidean gradient / dt).
RateResult descend(const CoefficientModel& model, const TerminalFunctional& xi,
                   const PathPoint& start, ControlPath alpha, const OptimizerOptions& opts) {
  project(alpha.slopes(), opts.clamp);
  const double dt = alpha.grid().dt();
  const std::size_t P = alpha.slopes().size();

  RateResult r;
  auto vg = flow::value_and_gradient_from(model, xi, start, alpha, opts.scheme);
  ControlPath trial = alpha;
  std::vector<double> direction(P);
  int idle = 0;
  for (std::size_t iter = 1;; ++iter) {
    r.iterations = iter;
    double norm2 = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      direction[p] = vg.gradient[p] / dt;
      double moved = alpha.slopes()[p] - direction[p];
      if (opts.clamp) moved = std::clamp(moved, -*opts.clamp, *opts.clamp);
      const double pd = alpha.slopes()[p] - moved;
      norm2 += pd * pd * dt;
    }
    r.grad_norm = std::sqrt(norm2);
    if (r.grad_norm <= opts.tol * (1.0 + std::abs(vg.value))) {
      r.converged = true;
      break;
    }
    if (iter >= opts.max_iter) break;

    bool accepted = false;
    double step = 1.0;
    double trial_value = 0.0;
    for (int h = 0; h < kMaxHalvings && !accepted; ++h, step *= kShrink) {
      double slope = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        double v = alpha.slopes()[p] - step * direction[p];
        if (opts.clamp) v = std::clamp(v, -*opts.clamp, *opts.clamp);
        trial.slopes()[p] = v;
        slope += vg.gradient[p] * (v - alpha.slopes()[p]);
      }
      if (slope >= 0.0) break;  // projection leaves no descent
      trial_value = flow::laplace_objective_from(model, xi, start, trial);
      accepted = trial_value <= vg.value + kArmijoSlope * slope;
    }
    if (!accepted) {
      r.stalled = true;
      break;
    }
    idle = (vg.value - trial_value <= kNoProgress * (1.0 + std::abs(vg.value))) ? idle + 1 : 0;
    std::swap(alpha, trial);
    vg = flow::value_and_gradient_from(model, xi, start, alpha, opts.scheme);
    if (idle >= kNoProgressRun) {
      r.stalled = true;
      break;
    }
  }
  r.value = vg.value;
  r.control = std::move(alpha);
  return r;
}

bool better(const RateResult& a, const RateResult& b) {
  if (a.value != b.value) return a.value < b.value;
  const auto sa = a.control.slopes();
  const auto sb = b.control.slopes();
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

ControlPath random_control(const TimeGrid& grid, std::size_t d, std::uint64_t seed,
                           std::uint64_t stream) {
  const CounterNormals normals(seed);
  ControlPath c(grid, d);
  for (std::size_t i = 0; i < grid.steps(); ++i)
    for (std::size_t q = 0; q < d; ++q)
      c.slope(i)[q] = normals.normal(stream, static_cast<std::uint32_t>(i),
                                     static_cast<std::uint32_t>(q));
  return c;
}

}  // namespace

RateResult minimize_laplace(const CoefficientModel& model, const TerminalFunctional& xi,
                            std::span<const double> x0, const TimeGrid& grid,
                            const OptimizerOptions& opts) {
  if (grid.steps() < 2) throw std::invalid_argument("minimize_laplace: need N >= 2");
  return minimize_laplace_from(model, xi, flow::origin_point(model, x0, grid), opts);
}

RateResult minimize_laplace_from(const CoefficientModel& model, const TerminalFunctional& xi,
                                 const PathPoint& start, const OptimizerOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("minimize_laplace: tol must be positive");
  if (opts.clamp && !(*opts.clamp > 0.0))
    throw std::invalid_argument("minimize_laplace: clamp must be positive");
  const TimeGrid tail = start.path.grid().tail_from(start.node);
  const std::size_t d = model.noise_dim();

  std::vector<ControlPath> starts;
  for (const auto& w : opts.warm_starts) {
    if (!w.grid().compatible_with(tail) || w.dim() != d)
      throw std::invalid_argument("minimize_laplace: warm start on a different grid");
    starts.emplace_back(tail, d, std::vector<double>(w.slopes().begin(), w.slopes().end()));
  }
  if (opts.zero_start) starts.emplace_back(tail, d);
  for (std::size_t r = 1; r < opts.restarts; ++r)
    starts.push_back(random_control(tail, d, opts.seed, r));
  if (starts.empty()) throw std::invalid_argument("minimize_laplace: no starting control");

  std::vector<RateResult> results(starts.size());
  parallel_for(starts.size(), opts.threads, [&](std::size_t i) {
    results[i] = descend(model, xi, start, starts[i], opts);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (better(results[i], results[best])) best = i;
  RateResult out = std::move(results[best]);
  out.restarts_used = starts.size();
  return out;
}

ExitPenalty::ExitPenalty(const Domain& domain, double level) : domain_(domain), level_(level) {
  if (!(level > 0.0)) throw std::invalid_argument("ExitPenalty: level must be positive");
}

double ExitPenalty::value(const DiscretePath&, const DiscretePath& x) const {
  return level_ * domain_.distance_to_complement(x.at(x.nodes() - 1));
}

void ExitPenalty::gradient(const DiscretePath&, const DiscretePath& x,
                           std::vector<PathSensitivity>& out) const {
  const auto xt = x.at(x.nodes() - 1);
  if (!domain_.inside(xt)) return;
  const auto g = domain_.signed_distance_gradient(xt);
  for (std::size_t c = 0; c < g.size(); ++c)
    out.push_back({x.nodes() - 1, PathSide::state, c, -level_ * g[c]});
}

double ExitPenalty::bound() const { return level_ * domain_.radius(); }

PenaltySchedule PenaltySchedule::geometric(double m0, std::size_t count) {
  if (!(m0 > 0.0) || count == 0)
    throw std::invalid_argument("PenaltySchedule: need m0 > 0 and at least one level");
  PenaltySchedule s;
  for (std::size_t k = 0; k < count; ++k) s.levels.push_back(std::ldexp(m0, static_cast<int>(k)));
  return s;
}

ControlPath rescale_control(const ControlPath& alpha, const TimeGrid& grid) {
  const double ratio = alpha.grid().horizon() / grid.horizon();
  ControlPath out(grid, alpha.dim());
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    const double s = (static_cast<double>(i) + 0.5) * grid.dt() * ratio;
    const auto src = std::min(alpha.steps() - 1,
                              static_cast<std::size_t>(s / alpha.grid().dt()));
    for (std::size_t q = 0; q < alpha.dim(); ++q) out.slope(i)[q] = alpha.slope(src)[q] * ratio;
  }
  return out;
}

ControlPath boundary_refine(const CoefficientModel& model, const Domain& domain,
                            std::span<const double> x0, const ControlPath& alpha) {
  const std::size_t n = model.state_dim();
  const std::size_t d = model.noise_dim();
  if (n != d) throw std::invalid_argument("boundary_refine: sigma must be square");
  constexpr int kMaxCorrections = 10;
  const double horizon = alpha.grid().horizon();
  ControlPath a = alpha;
  std::vector<double> sigma(n * d);
  for (int iter = 0;; ++iter) {
    const auto r = flow::integrate(model, x0, a);
    const auto xt = r.x.at(r.x.nodes() - 1);
    if (std::abs(domain.signed_distance(xt)) <= 1e-6) return a;
    if (iter == kMaxCorrections)
      throw NumericalError("boundary_refine: terminal state not on the boundary after 10 corrections");
    const auto target = domain.boundary_project(xt);
    Eigen::VectorXd shift(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) shift(c) = (target[c] - xt[c]) / horizon;
    for (std::size_t i = 0; i < a.steps(); ++i) {
      model.diffusion(i, r.omega, r.x, sigma);
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          s(sigma.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (!lu.isInvertible())
        throw NumericalError("boundary_refine: singular diffusion at step " + std::to_string(i));
      const Eigen::VectorXd u = lu.solve(shift);
      for (std::size_t q = 0; q < d; ++q) a.slope(i)[q] += u(q);
    }
  }
}

ExitResult exit_rate(const CoefficientModel& model, const Domain& domain,
                     std::span<const double> x0, const TimeGrid& grid, const ExitOptions& opts) {
  if (domain.dim() != model.state_dim())
    throw std::invalid_argument("exit_rate: domain dimension != state_dim");
  if (opts.stride == 0) throw std::invalid_argument("exit_rate: stride must be >= 1");
  const auto& levels = opts.schedule.levels;
  if (levels.empty() || !std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end() || !(levels[0] > 0.0))
    throw std::invalid_argument("exit_rate: penalty levels must be positive and strictly increasing");

  const std::size_t d = model.noise_dim();
  ExitResult out;
  if (!domain.inside(x0)) {
    out.rate.control = ControlPath(grid, d);
    out.rate.converged = true;
    return out;
  }

  std::vector<std::size_t> horizons;
  // The optimizer needs at least two steps per horizon.
  for (std::size_t j = opts.stride; j < grid.steps(); j += opts.stride)
    if (j >= 2) horizons.push_back(j);
  horizons.push_back(grid.steps());

  const bool square = model.state_dim() == d;
  if (!square) out.warnings.push_back("boundary refinement skipped: sigma is not square");
  const std::size_t chains = std::max<std::size_t>(1, opts.optimizer.restarts);

  std::optional<ControlPath> previous;
  bool have_best = false;
  bool all_converged = true;
  for (const std::size_t j : horizons) {
    const TimeGrid hg = grid.head_to(j);
    std::vector<std::vector<RateResult>> runs(chains);
    for (std::size_t c = 0; c < chains; ++c) {
      OptimizerOptions o = opts.optimizer;
      o.restarts = 1;
      o.warm_starts.clear();
      if (c == 0) {
        o.zero_start = true;
        if (previous) o.warm_starts.push_back(rescale_control(*previous, hg));
      } else {
        o.zero_start = false;
        o.warm_starts.push_back(random_control(hg, d, opts.optimizer.seed, c));
      }
      for (const double m : levels) {
        const ExitPenalty penalty(domain, m);
        runs[c].push_back(minimize_laplace(model, penalty, x0, hg, o));
        o.zero_start = false;
        o.warm_starts.assign(1, runs[c].back().control);
      }
    }
    std::size_t bc = 0;
    for (std::size_t c = 1; c < chains; ++c)
      if (better(runs[c].back(), runs[bc].back())) bc = c;
    const auto& chain = runs[bc];
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const bool settled = chain[k].converged || chain[k].stalled;
      out.levels.push_back({levels[k], chain[k].value, hg.horizon(), settled});
      all_converged = all_converged && settled;
    }

    RateResult candidate = chain.back();
    const auto flowed = flow::integrate(model, x0, candidate.control);
    const double sd = domain.signed_distance(flowed.x.at(flowed.x.nodes() - 1));
    bool refined = false;
    if (square && std::abs(sd) <= opts.eta) {
      try {
        candidate.control = boundary_refine(model, domain, x0, candidate.control);
        candidate.value = candidate.control.action();
        refined = true;
      } catch (const NumericalError& e) {
        out.warnings.push_back("horizon " + std::to_string(hg.horizon()) + ": " + e.what());
      }
    }
    if (!have_best || candidate.value < out.rate.value) {
      out.rate = candidate;
      out.best_horizon = hg.horizon();
      out.refined = refined;
      have_best = true;
    }
    previous = chain.back().control;
  }
  out.rate.converged = all_converged;
  if (!all_converged) out.warnings.push_back("optimizer hit max_iter at some penalty level");
  return out;
}

}  // namespace ldplab::rate
