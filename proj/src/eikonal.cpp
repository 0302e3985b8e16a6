#include "ldplab/eikonal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ldplab/error.hpp"
#include "ldplab/flow.hpp"
#include "ldplab/parallel.hpp"

namespace ldplab::eikonal {

HamiltonianValue hamiltonian(std::span<const double> b, std::span<const double> sigma,
                             std::span<const double> p_omega, std::span<const double> p_x,
                             double K0) {
  if (!(K0 > 0.0)) throw std::invalid_argument("hamiltonian: K0 must be positive");
  const std::size_t n = p_x.size();
  const std::size_t d = p_omega.size();
  if (b.size() != n || sigma.size() != n * d)
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  double bp = 0.0;
  for (std::size_t r = 0; r < n; ++r) bp += b[r] * p_x[r];
  std::vector<double> q(p_omega.begin(), p_omega.end());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) q[c] += sigma[r * d + c] * p_x[r];
  double qq = 0.0;
  for (double v : q) qq += v * v;
  const double qn = std::sqrt(qq);

  HamiltonianValue out{0.0, std::vector<double>(d)};
  if (qn <= K0) {
    out.value = bp - 0.5 * qq;
    for (std::size_t c = 0; c < d; ++c) out.minimizer[c] = -q[c];
  } else {
    out.value = bp + 0.5 * K0 * K0 - K0 * qn;
    for (std::size_t c = 0; c < d; ++c) out.minimizer[c] = -K0 * q[c] / qn;
  }
  return out;
}

Hamiltonian::Hamiltonian(const CoefficientModel& model, double K0) : model_(model), K0_(K0) {
  if (!(K0 > 0.0)) throw std::invalid_argument("Hamiltonian: K0 must be positive");
}

HamiltonianValue Hamiltonian::operator()(const PathPoint& theta, std::span<const double> p_omega,
                                         std::span<const double> p_x) const {
  const std::size_t d = model_.noise_dim();
  const std::size_t n = model_.state_dim();
  const auto omega = theta.omega_part(d);
  const auto x = theta.state_part(d);
  std::vector<double> b(n), sigma(n * d);
  model_.drift(theta.node, omega, x, b);
  model_.diffusion(theta.node, omega, x, sigma);
  return hamiltonian(b, sigma, p_omega, p_x, K0_);
}

LimitReport hamiltonian_limit_check(const CoefficientModel& model, const PathPoint& theta,
                                    std::span<const double> p_omega, std::span<const double> p_x,
                                    const std::vector<double>& levels) {
  LimitReport r;
  r.levels = levels;
  // A level large enough never to clip gives the unclamped expression.
  const double huge = std::numeric_limits<double>::max();
  const auto free = Hamiltonian(model, huge)(theta, p_omega, p_x);
  r.unclamped = free.value;
  double qq = 0.0;
  for (double a : free.minimizer) qq += a * a;
  r.q_norm = std::sqrt(qq);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    r.values.push_back(Hamiltonian(model, levels[i])(theta, p_omega, p_x).value);
    if (i > 0 && r.values[i] > r.values[i - 1]) r.nonincreasing = false;
    if (levels[i] >= r.q_norm && r.values[i] != r.unclamped) r.exact_above_threshold = false;
  }
  return r;
}

ValueResult value_function(const CoefficientModel& model, const TerminalFunctional& xi,
                           const PathPoint& theta, const rate::OptimizerOptions& opts) {
  const std::size_t d = model.noise_dim();
  ValueResult out;
  if (theta.node == theta.path.grid().steps()) {
    out.value = xi.value(theta.omega_part(d), theta.state_part(d));
    return out;
  }
  const auto r = rate::minimize_laplace_from(model, xi, theta, opts);
  out.value = r.value;
  out.control.assign(r.control.slopes().begin(), r.control.slopes().end());
  out.sup_control = r.control.sup_norm();
  out.converged = r.converged;
  return out;
}

PathPoint extend_linear(const PathPoint& theta, std::size_t h_steps,
                        std::span<const double> slope) {
  if (slope.size() != theta.path.dim())
    throw std::invalid_argument("extend_linear: slope must have the joint dimension");
  if (theta.node + h_steps > theta.path.grid().steps())
    throw std::invalid_argument("extend_linear: extension runs past the horizon");
  PathPoint out{theta.node + h_steps, theta.path};
  const double dt = theta.path.grid().dt();
  for (std::size_t i = 1; i <= h_steps; ++i)
    for (std::size_t c = 0; c < slope.size(); ++c)
      out.path(theta.node + i, c) =
          theta.path(theta.node, c) + slope[c] * static_cast<double>(i) * dt;
  return out;
}

std::vector<double> control_levels(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo < hi)) throw std::invalid_argument("control_levels: need lo < hi, count >= 2");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

double dp_residual(const CoefficientModel& model, const TerminalFunctional& xi,
                   const PathPoint& theta, std::size_t s_node, const std::vector<double>& levels,
                   const rate::OptimizerOptions& opts) {
  const TimeGrid& grid = theta.path.grid();
  if (s_node < theta.node || s_node > grid.steps())
    throw std::invalid_argument("dp_residual: need t <= s <= T");
  if (s_node == theta.node) return 0.0;
  if (levels.empty()) throw std::invalid_argument("dp_residual: empty control grid");
  const std::size_t d = model.noise_dim();
  const std::size_t steps = s_node - theta.node;
  const std::size_t slots = steps * d;
  double combos = std::pow(static_cast<double>(levels.size()), static_cast<double>(slots));
  if (combos > 1e6)
    throw std::invalid_argument("dp_residual: more than 1e6 first-leg controls to enumerate");

  const double u_t = value_function(model, xi, theta, opts).value;
  const auto total = static_cast<std::size_t>(combos);
  const double dt = grid.dt();
  const TimeGrid tail = grid.tail_from(theta.node);
  std::vector<double> candidate(total);
  parallel_for(total, opts.threads, [&](std::size_t idx) {
    ControlPath leg(tail, d);
    double action = 0.0;
    std::size_t code = idx;
    for (std::size_t slot = 0; slot < slots; ++slot) {
      const double a = levels[code % levels.size()];
      code /= levels.size();
      leg.slopes()[slot] = a;
      action += 0.5 * a * a * dt;
    }
    const auto r = flow::integrate_from(model, theta, leg);
    const PathPoint next = PathPoint::join(s_node, r.omega, r.x);
    rate::OptimizerOptions inner = opts;
    inner.threads = 1;
    candidate[idx] = action + value_function(model, xi, next, inner).value;
  });
  return std::abs(u_t - *std::min_element(candidate.begin(), candidate.end()));
}

std::vector<double> default_K_grid() {
  std::vector<double> g;
  for (double k = 0.25; k <= 32.0; k *= 2.0) g.push_back(k);
  return g;
}

ClampLevel clamp_level_search(const CoefficientModel& model, const TerminalFunctional& xi,
                              const PathPoint& theta, const std::vector<double>& K_grid,
                              const rate::OptimizerOptions& opts) {
  if (K_grid.empty() || !std::is_sorted(K_grid.begin(), K_grid.end()) || !(K_grid[0] > 0.0))
    throw std::invalid_argument("clamp_level_search: K grid must be positive and increasing");
  std::map<double, ValueResult> cache;
  double max_sup = 0.0;
  auto clamped = [&](double K) -> const ValueResult& {
    auto it = cache.find(K);
    if (it == cache.end()) {
      rate::OptimizerOptions o = opts;
      o.clamp = K;
      it = cache.emplace(K, value_function(model, xi, theta, o)).first;
      max_sup = std::max(max_sup, it->second.sup_control);
    }
    return it->second;
  };
  for (double K : K_grid) {
    const double u = clamped(K).value;
    if (std::abs(u - clamped(2.0 * K).value) < 1e-9) return {K, u, max_sup};
  }
  std::ostringstream msg;
  msg << "clamp_level_search: no plateau up to K = " << K_grid.back()
      << "; largest |alpha*| observed " << max_sup;
  throw NumericalError(msg.str());
}

std::vector<std::vector<double>> default_probe_slopes(std::size_t joint_dim) {
  std::vector<std::vector<double>> s{std::vector<double>(joint_dim, 0.0)};
  for (std::size_t j = 0; j < joint_dim; ++j) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> v(joint_dim, 0.0);
      v[j] = sign;
      s.push_back(v);
    }
  }
  return s;
}

ValueFunctionProbe viscosity_residual(const CoefficientModel& model, const TerminalFunctional& xi,
                                      const PathPoint& theta, std::size_t h_steps,
                                      const std::vector<std::vector<double>>& slopes,
                                      const std::vector<double>& K_grid,
                                      const rate::OptimizerOptions& opts) {
  const TimeGrid& grid = theta.path.grid();
  if (h_steps == 0 || theta.node + 2 * h_steps > grid.steps())
    throw std::invalid_argument("viscosity_residual: need t <= T - 2h");
  const std::size_t d = model.noise_dim();
  const std::size_t n = model.state_dim();
  const std::size_t m = d + n;
  const double h = static_cast<double>(h_steps) * grid.dt();

  ValueFunctionProbe out;
  out.t = theta.time();
  out.slopes = slopes;
  const ClampLevel level = clamp_level_search(model, xi, theta, K_grid, opts);
  out.K0 = level.K0;
  const ModelBounds mb = model.bounds();
  out.K = std::max(1.0, level.K0) * (1.0 + std::max(mb.drift_bound, mb.diffusion_bound));
  out.u = value_function(model, xi, theta, opts).value;

  std::vector<double> probed(slopes.size());
  rate::OptimizerOptions inner = opts;
  inner.threads = 1;
  parallel_for(slopes.size(), opts.threads, [&](std::size_t i) {
    probed[i] = value_function(model, xi, extend_linear(theta, h_steps, slopes[i]), inner).value;
  });

  Eigen::MatrixXd A(static_cast<Eigen::Index>(slopes.size()), static_cast<Eigen::Index>(m + 1));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(slopes.size()));
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = h;
    for (std::size_t c = 0; c < m; ++c) A(row, static_cast<Eigen::Index>(c + 1)) = slopes[i][c] * h;
    rhs(row) = probed[i] - out.u;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < static_cast<Eigen::Index>(m + 1))
    throw std::invalid_argument("viscosity_residual: probe slopes do not span the joint space");
  const Eigen::VectorXd sol = qr.solve(rhs);
  out.misfit = std::sqrt((A * sol - rhs).squaredNorm() / static_cast<double>(slopes.size())) / h;
  out.du_dt = sol(0);
  for (std::size_t c = 0; c < d; ++c) out.du_domega.push_back(sol(static_cast<Eigen::Index>(c + 1)));
  for (std::size_t c = 0; c < n; ++c)
    out.du_dx.push_back(sol(static_cast<Eigen::Index>(d + c + 1)));
  const double F = Hamiltonian(model, level.K0)(theta, out.du_domega, out.du_dx).value;
  out.residual = -out.du_dt - F;
  return out;
}

TimeIncrement time_increment(const CoefficientModel& model, const TerminalFunctional& xi,
                             const PathPoint& theta, std::size_t h_steps,
                             const rate::OptimizerOptions& opts) {
  const TimeGrid& grid = theta.path.grid();
  if (h_steps == 0 || theta.node + h_steps > grid.steps())
    throw std::invalid_argument("time_increment: need t + h <= T");
  const std::size_t d = model.noise_dim();
  const std::vector<double> flat(theta.path.dim(), 0.0);
  const ValueResult later = value_function(model, xi, extend_linear(theta, h_steps, flat), opts);

  // Idling on [t, t + h] and then following the later optimizer is admissible
  // at t, so it seeds the search.
  rate::OptimizerOptions o = opts;
  const TimeGrid tail = grid.tail_from(theta.node);
  std::vector<double> seed(tail.steps() * d, 0.0);
  std::copy(later.control.begin(), later.control.end(), seed.begin() + static_cast<long>(h_steps * d));
  o.warm_starts.emplace_back(tail, d, std::move(seed));
  const ValueResult now = value_function(model, xi, theta, o);

  const ModelBounds mb = model.bounds();
  const double C = std::max(mb.drift_bound, mb.diffusion_bound);
  const double h = static_cast<double>(h_steps) * grid.dt();
  return {now.value, later.value, (0.5 * C * C + C) * h};
}

}  // namespace ldplab::eikonal
