#pragma once

// Closed forms and brute-force references used as independent checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P[sup_{t<=T} |x0 + s W_t - c| >= r] for the interval (c - r, c + r), by
// the reflection series with total variance s^2 T.
inline double interval_exit_probability(double lower, double upper, double x0, double variance) {
  const double sd = std::sqrt(variance);
  const double width = upper - lower;
  double stay = 0.0;
  for (int k = -50; k <= 50; ++k) {
    const double shift = 2.0 * k * width;
    stay += normal_cdf((upper - x0 + shift) / sd) - normal_cdf((lower - x0 + shift) / sd);
    stay -= normal_cdf((2.0 * upper - lower - x0 + shift) / sd) -
            normal_cdf((upper - x0 + shift) / sd);
  }
  return 1.0 - stay;
}

// Penalty value min_a 1/2 a^2 T + m (distance - a T)^+ for a straight exit
// of Brownian motion over `distance` in time T.
inline double straight_penalty(double m, double distance, double T) {
  if (m * T < distance) return m * distance - 0.5 * m * m * T;
  return distance * distance / (2.0 * T);
}

// -eps ln E exp(-lambda X_T / eps), X = x0 + b T + sigma sqrt(eps) W_T.
inline double gaussian_laplace(double lambda, double x0, double b, double sigma, double T) {
  return lambda * (x0 + b * T) - 0.5 * lambda * lambda * sigma * sigma * T;
}

// Normalized Black-Scholes call N(d+) - e^k N(d-), direct formula.
inline double bs_call(double k, double v) {
  const double s = std::sqrt(v);
  const double dp = -k / s + 0.5 * s;
  return normal_cdf(dp) - std::exp(k) * normal_cdf(dp - s);
}

// min over the ball |a| <= K0 of 1/2 |a|^2 + a.q by nested grid refinement
// (d = 1 or 2): a coarse grid of n points per axis, then four zooms by a
// factor n/4 around the best point. Points outside the ball are pulled
// onto its boundary.
inline double brute_force_inf(const std::vector<double>& q, double K0, int n = 0) {
  const std::size_t d = q.size();
  auto f = [&](const double* a) {
    double v = 0.0;
    for (std::size_t j = 0; j < d; ++j) v += 0.5 * a[j] * a[j] + a[j] * q[j];
    return v;
  };
  auto inside = [&](const double* a) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) r2 += a[j] * a[j];
    return r2 <= K0 * K0 * (1.0 + 1e-15);
  };
  double best[2] = {0.0, 0.0};
  double best_val = f(best);
  double half = K0;
  if (n <= 0) n = d == 1 ? 4000 : 400;
  for (int zoom = 0; zoom < 5; ++zoom) {
    const double center[2] = {best[0], best[1]};
    const double step = 2.0 * half / n;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= (d == 1 ? 0 : n); ++j) {
        double a[2] = {center[0] - half + i * step, d == 1 ? 0.0 : center[1] - half + j * step};
        if (!inside(a)) {
          // Pull boundary candidates onto the circle so the constrained
          // optimum is reachable.
          double r = 0.0;
          for (std::size_t c = 0; c < d; ++c) r += a[c] * a[c];
          r = std::sqrt(r);
          for (std::size_t c = 0; c < d; ++c) a[c] *= K0 / r;
        }
        const double v = f(a);
        if (v < best_val) {
          best_val = v;
          best[0] = a[0];
          best[1] = a[1];
        }
      }
    }
    half = 2.0 * step;
  }
  return best_val;
}

}  // namespace oracle
