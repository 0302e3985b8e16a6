#pragma once

#include <span>
#include <vector>

#include "ldplab/models.hpp"
#include "ldplab/paths.hpp"
#include "ldplab/rate.hpp"

namespace ldplab::eikonal {

struct HamiltonianValue {
  double value;
  /// a* = -q clipped to norm K0, q = p_omega + sigma^T p_x.
  std::vector<double> minimizer;
};

/// b . p_x + inf_{|a| <= K0} { |a|^2 / 2 + a . q } for given coefficients
/// (sigma row-major n x d).
HamiltonianValue hamiltonian(std::span<const double> b, std::span<const double> sigma,
                             std::span<const double> p_omega, std::span<const double> p_x,
                             double K0);

/// Truncated Hamiltonian of a model, evaluated at path points.
class Hamiltonian {
 public:
  Hamiltonian(const CoefficientModel& model, double K0);
  HamiltonianValue operator()(const PathPoint& theta, std::span<const double> p_omega,
                              std::span<const double> p_x) const;
  double truncation() const { return K0_; }

 private:
  const CoefficientModel& model_;
  double K0_;
};

struct LimitReport {
  std::vector<double> levels;
  std::vector<double> values;
  double q_norm = 0.0;
  /// b . p_x - |q|^2 / 2.
  double unclamped = 0.0;
  bool nonincreasing = true;
  /// Every level >= |q| reproduces the unclamped value exactly.
  bool exact_above_threshold = true;
  bool ok() const { return nonincreasing && exact_above_threshold; }
};

LimitReport hamiltonian_limit_check(const CoefficientModel& model, const PathPoint& theta,
                                    std::span<const double> p_omega, std::span<const double> p_x,
                                    const std::vector<double>& levels);

struct ValueResult {
  double value = 0.0;
  /// Optimal control on [t, T] (empty grid at t = T).
  std::vector<double> control;
  double sup_control = 0.0;
  bool converged = true;
};

/// u(t, omega_hat): the Laplace problem on [t, T] continuing the frozen path.
ValueResult value_function(const CoefficientModel& model, const TerminalFunctional& xi,
                           const PathPoint& theta, const rate::OptimizerOptions& opts = {});

/// |u(t) - min over first-leg controls of (action + u(s, induced point))|,
/// enumerating every per-step slope from `levels` (per noise component)
/// between t and s.
double dp_residual(const CoefficientModel& model, const TerminalFunctional& xi,
                   const PathPoint& theta, std::size_t s_node, const std::vector<double>& levels,
                   const rate::OptimizerOptions& opts = {});

/// Evenly spaced levels in [lo, hi].
std::vector<double> control_levels(double lo, double hi, std::size_t count);

struct ClampLevel {
  double K0;
  double value;
  /// Largest |alpha*| seen over the search.
  double max_sup_control;
};

/// Smallest K in K_grid whose clamped value changes by < 1e-9 when K doubles.
ClampLevel clamp_level_search(const CoefficientModel& model, const TerminalFunctional& xi,
                              const PathPoint& theta, const std::vector<double>& K_grid,
                              const rate::OptimizerOptions& opts = {});

std::vector<double> default_K_grid();

struct ValueFunctionProbe {
  double t = 0.0;
  double u = 0.0;
  double du_dt = 0.0;
  std::vector<double> du_domega;
  std::vector<double> du_dx;
  double residual = 0.0;
  /// RMS of the least-squares misfit divided by h.
  double misfit = 0.0;
  double K0 = 0.0;
  /// Lipschitz level of the probe bundle, max(1, K0) (1 + C).
  double K = 0.0;
  std::vector<std::vector<double>> slopes;
};

/// The flat extension plus +-e_j for every joint direction.
std::vector<std::vector<double>> default_probe_slopes(std::size_t joint_dim);

/// Fits (du/dt, du/domega_hat) from u at theta and at the linear extensions
/// of theta over [t, t + h], h = h_steps * dt, and evaluates
/// -du/dt - F_{K0}(theta, du/domega, du/dx).
ValueFunctionProbe viscosity_residual(const CoefficientModel& model, const TerminalFunctional& xi,
                                      const PathPoint& theta, std::size_t h_steps,
                                      const std::vector<std::vector<double>>& slopes,
                                      const std::vector<double>& K_grid,
                                      const rate::OptimizerOptions& opts = {});

struct TimeIncrement {
  double u_t;
  double u_t_plus_h;
  double bound;
};

/// u(t, omega_hat) and u(t + h, omega_hat stopped at t), with the bound
/// (C^2/2 + C) h, C = max(drift bound, diffusion bound).
TimeIncrement time_increment(const CoefficientModel& model, const TerminalFunctional& xi,
                             const PathPoint& theta, std::size_t h_steps,
                             const rate::OptimizerOptions& opts = {});

/// theta extended linearly with `slope` (joint d + n) from t to t + h.
PathPoint extend_linear(const PathPoint& theta, std::size_t h_steps, std::span<const double> slope);

}  // namespace ldplab::eikonal
