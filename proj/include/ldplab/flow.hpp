#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ldplab/models.hpp"
#include "ldplab/paths.hpp"

namespace ldplab::flow {

/// Controlled pair (omega^alpha, x^alpha) on the full grid. For a shifted
/// start the values up to the start node are the frozen prefix.
struct ControlledFlowResult {
  DiscretePath omega;
  DiscretePath x;
  double action = 0.0;
  std::optional<double> objective;
};

/// Explicit Euler from x0 at time 0. alpha fixes the grid.
ControlledFlowResult integrate(const CoefficientModel& model, std::span<const double> x0,
                               const ControlPath& alpha);

/// Euler on [t, T] continuing the frozen joint path of `start`. alpha lives
/// on start.path.grid().tail_from(start.node).
ControlledFlowResult integrate_from(const CoefficientModel& model, const PathPoint& start,
                                    const ControlPath& alpha);

/// xi(omega^alpha, x^alpha) + action.
double laplace_objective(const CoefficientModel& model, const TerminalFunctional& xi,
                         std::span<const double> x0, const ControlPath& alpha);
double laplace_objective_from(const CoefficientModel& model, const TerminalFunctional& xi,
                              const PathPoint& start, const ControlPath& alpha);

enum class GradientScheme { automatic, central_fd, forward_sensitivity };

/// Gradient of the discrete objective with respect to the N*d slopes
/// (Euclidean, step-major). `automatic` picks forward sensitivities when
/// both the model and xi provide closed-form partials.
std::vector<double> gradient(const CoefficientModel& model, const TerminalFunctional& xi,
                             std::span<const double> x0, const ControlPath& alpha,
                             GradientScheme scheme = GradientScheme::automatic);
std::vector<double> gradient_from(const CoefficientModel& model, const TerminalFunctional& xi,
                                  const PathPoint& start, const ControlPath& alpha,
                                  GradientScheme scheme = GradientScheme::automatic);

/// Objective value and gradient from one integration when sensitivities are used.
struct ValueAndGradient {
  double value;
  std::vector<double> gradient;
};
ValueAndGradient value_and_gradient_from(const CoefficientModel& model,
                                         const TerminalFunctional& xi, const PathPoint& start,
                                         const ControlPath& alpha,
                                         GradientScheme scheme = GradientScheme::automatic);

/// Start point at time 0 with omega = 0 and x = x0 on `grid`.
PathPoint origin_point(const CoefficientModel& model, std::span<const double> x0,
                       const TimeGrid& grid);

}  // namespace ldplab::flow
