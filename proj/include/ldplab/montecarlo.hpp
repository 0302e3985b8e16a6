#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldplab/models.hpp"
#include "ldplab/paths.hpp"

namespace ldplab::mc {

struct McConfig {
  double epsilon = 0.1;
  std::size_t n_paths = 100000;
  TimeGrid grid{1.0, 128};
  std::uint64_t seed = 0;
  /// Path p uses the normals of path p/2, negated for odd p.
  bool antithetic = false;
  /// Deterministic drift alpha of the sampling measure.
  std::optional<ControlPath> is_control;
  std::size_t threads = 1;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double n_effective = 0.0;
  /// ln of the sample variance of the integrand (-inf when constant).
  double log_integrand_variance = 0.0;
  /// Mean and variance of ln(1/M) when importance sampling was used.
  std::optional<std::pair<double, double>> log_weights;
  std::vector<std::string> warnings;
};

/// Importance-sampled Laplace estimate plus the upper-bound estimator
/// mean[xi] + 1/2 int |alpha|^2 under the drifted measure.
struct IsEstimate {
  McEstimate estimate;
  double upper_bound = 0.0;
  double upper_bound_se = 0.0;
};

struct ExitEstimate {
  McEstimate probability;
  /// -eps ln p.
  McEstimate rate;
  bool bridge_used = false;
};

struct SimulatedPath {
  DiscretePath noise;
  DiscretePath state;
};

/// Euler-Maruyama under P^eps (eps = 0 gives the drift ODE).
std::vector<SimulatedPath> simulate_paths(const CoefficientModel& model,
                                          std::span<const double> x0, const McConfig& cfg);

/// f(noise, state) for every simulated path, in path order.
std::vector<double> map_paths(
    const CoefficientModel& model, std::span<const double> x0, const McConfig& cfg,
    const std::function<double(const DiscretePath& noise, const DiscretePath& state)>& f);

/// -eps ln mean(e^{-xi/eps}) from plain samples.
McEstimate laplace_naive(const CoefficientModel& model, const TerminalFunctional& xi,
                         std::span<const double> x0, const McConfig& cfg);

/// Samples under the alpha-drifted measure (cfg.is_control) and reweights
/// by 1/M^{eps,alpha} in log space.
IsEstimate laplace_is(const CoefficientModel& model, const TerminalFunctional& xi,
                      std::span<const double> x0, const McConfig& cfg);

/// P[exit before T] with node detection; `bridge` adds the Brownian-bridge
/// crossing probability between nodes for constant scalar sigma on an interval.
ExitEstimate exit_prob(const CoefficientModel& model, const Domain& domain,
                       std::span<const double> x0, const McConfig& cfg, bool bridge = false);

struct ConvergenceRow {
  double eps;
  double estimate;
  double std_error;
  double ci_lo;
  double ci_hi;
  double limit;
  double abs_gap;
};

/// One row per eps of a strictly decreasing schedule.
std::vector<ConvergenceRow> convergence_study(
    const std::vector<double>& eps_schedule, double limit,
    const std::function<McEstimate(double eps)>& estimate);

/// Normal-approximation mean and error of a linear-space sample reduced in
/// index order; shared with the smile call-rate estimator.
struct LogMean {
  double log_mean;
  double rel_se;
  double log_variance;
};
LogMean reduce_log_values(std::span<const double> log_values);

/// value = -eps ln(mean) with the CI mapped through the same transform.
McEstimate log_mean_estimate(const LogMean& m, double eps);

}  // namespace ldplab::mc
