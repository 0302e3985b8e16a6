#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldplab/models.hpp"
#include "ldplab/montecarlo.hpp"
#include "ldplab/rate.hpp"

namespace ldplab::smile {

/// ln of the out-of-the-money value (call for k >= 0, put for k < 0) at
/// total variance v > 0. Stable for |d+-| up to a few hundred.
double log_time_value(double k, double v);

/// Normalized call N(d+) - e^k N(d-); the intrinsic value at v = 0.
double bs_price(double k, double v);
double log_bs_price(double k, double v);

/// Total variance reproducing the normalized call price c.
double implied_total_variance(double c, double k);
/// Same from ln(c - (1 - e^k)^+), which keeps deep in-the-money quotes exact.
double implied_total_variance_from_log_time_value(double log_tv, double k);

struct SmallVRow {
  double v;
  double v_log_price;
  /// v ln c + k^2 / 2.
  double gap;
};
std::vector<SmallVRow> small_v_identity_check(double k, const std::vector<double>& v_schedule);

struct SmileAsymptote {
  double k = 0.0;
  double Q0 = 0.0;
  double Sigma0_sq = 0.0;
  double a_used = 0.0;
  /// (a, Q0(a, k)) in schedule order.
  std::vector<std::pair<double, double>> trace;
};

struct SmileOptions {
  TimeGrid grid{1.0, 64};
  rate::ExitOptions exit = [] {
    rate::ExitOptions e;
    e.stride = 8;
    return e;
  }();
  /// Successive Q0(a, k) closer than this declare the a -> -inf limit.
  double stabilization = 1e-4;
};

/// Exit rate of the driftless limit flow from 0 through (a, k) on [0, 1],
/// scanned over a decreasing schedule of a.
SmileAsymptote q0_of_strike(const VolPtr& vol, double k, const std::vector<double>& a_schedule,
                            const SmileOptions& opts = {});

struct TimeIndifferenceReport {
  std::size_t trials = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Compares sigma at node i of a path on (T, N) with sigma at node i of the
/// same values on (T / c, N), i.e. sigma_{ct}(x) against sigma_t(x^c).
TimeIndifferenceReport time_indifference_check(const VolFunctional& vol, std::size_t trials,
                                               std::uint64_t seed);

/// -eps ln E[(e^{X_1} - e^k)^+] under P^eps for the log-price model, one
/// row per eps, with the gap to `limit`.
std::vector<mc::ConvergenceRow> mc_call_rate(const VolPtr& vol, double k,
                                             const std::vector<double>& eps_schedule,
                                             const mc::McConfig& cfg, double limit);

}  // namespace ldplab::smile
