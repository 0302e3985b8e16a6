#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldplab/flow.hpp"
#include "ldplab/models.hpp"
#include "ldplab/paths.hpp"

namespace ldplab::rate {

struct OptimizerOptions {
  std::size_t restarts = 1;
  std::size_t max_iter = 500;
  /// Converged when grad_norm <= tol * (1 + |value|).
  double tol = 1e-6;
  /// Componentwise bound |alpha| <= clamp.
  std::optional<double> clamp;
  std::uint64_t seed = 0;
  flow::GradientScheme scheme = flow::GradientScheme::automatic;
  /// Extra starting controls, tried before alpha = 0 and the random starts.
  std::vector<ControlPath> warm_starts;
  bool zero_start = true;
  std::size_t threads = 1;
};

struct RateResult {
  double value = 0.0;
  ControlPath control{TimeGrid(1.0, 1), 1};
  /// L^2 norm of the projected descent direction at the returned control.
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t restarts_used = 0;
  bool converged = false;
  /// Line search could not decrease the objective (typical at penalty kinks).
  bool stalled = false;
};

/// Projected gradient descent with Armijo backtracking on the discretized
/// Laplace functional xi(omega^alpha, x^alpha) + 1/2 int |alpha|^2.
RateResult minimize_laplace(const CoefficientModel& model, const TerminalFunctional& xi,
                            std::span<const double> x0, const TimeGrid& grid,
                            const OptimizerOptions& opts = {});

/// Same over controls on [t, T] continuing the frozen path of `start`.
RateResult minimize_laplace_from(const CoefficientModel& model, const TerminalFunctional& xi,
                                 const PathPoint& start, const OptimizerOptions& opts = {});

/// m * d(x_T, O^c) as a terminal functional.
class ExitPenalty final : public TerminalFunctional {
 public:
  ExitPenalty(const Domain& domain, double level);
  std::string kind() const override { return "exit_penalty"; }
  double value(const DiscretePath& omega, const DiscretePath& x) const override;
  bool has_gradient() const override { return true; }
  void gradient(const DiscretePath& omega, const DiscretePath& x,
                std::vector<PathSensitivity>& out) const override;
  double bound() const override;
  double lipschitz() const override { return level_; }

 private:
  const Domain& domain_;
  double level_;
};

struct PenaltySchedule {
  std::vector<double> levels;
  /// m0 * 2^k for k < count.
  static PenaltySchedule geometric(double m0 = 1.0, std::size_t count = 12);
};

struct ExitOptions {
  PenaltySchedule schedule = PenaltySchedule::geometric();
  /// Horizons are the nodes stride, 2*stride, ... (at least 2), always including N.
  std::size_t stride = 1;
  /// Refine when the terminal state is within eta of the boundary.
  double eta = 0.1;
  OptimizerOptions optimizer;
};

struct LevelRow {
  double level;
  double value;
  double horizon;
  /// Converged, or stalled at a penalty kink; false only on max_iter.
  bool settled = true;
};

struct ExitResult {
  /// value = Q0 estimate; control lives on the grid of the best horizon.
  RateResult rate;
  std::vector<LevelRow> levels;
  double best_horizon = 0.0;
  bool refined = false;
  std::vector<std::string> warnings;
};

ExitResult exit_rate(const CoefficientModel& model, const Domain& domain,
                     std::span<const double> x0, const TimeGrid& grid,
                     const ExitOptions& opts = {});

/// alpha_i += sigma_i^{-1} (proj(x_T) - x_T) / T, re-integrating after each
/// correction, until x_T is on the boundary within 1e-6. The horizon is
/// alpha's grid.
ControlPath boundary_refine(const CoefficientModel& model, const Domain& domain,
                            std::span<const double> x0, const ControlPath& alpha);

/// Slopes of `alpha` stretched onto `grid` so that the integral of the
/// control over the whole horizon is preserved.
ControlPath rescale_control(const ControlPath& alpha, const TimeGrid& grid);

}  // namespace ldplab::rate
