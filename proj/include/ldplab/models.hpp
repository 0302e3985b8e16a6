#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldplab/paths.hpp"

namespace ldplab {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Declared regularity of a coefficient model. Only the Lipschitz constant
/// is required by the Laplace results; the exit and smile results also use
/// the bounds and the ellipticity floor.
struct ModelBounds {
  double lipschitz = 0.0;
  double drift_bound = kUnbounded;
  double diffusion_bound = kUnbounded;
  /// Lower bound on the smallest eigenvalue of sigma sigma^T; 0 = not claimed.
  double ellipticity_floor = 0.0;
};

enum class PathSide { noise, state };

/// Derivative of the coefficients at some node with respect to one
/// component of the noise or state path at an earlier (or the same) node.
struct CoefficientPartial {
  std::size_t node;
  PathSide side;
  std::size_t component;
  std::vector<double> drift;      // n entries
  std::vector<double> diffusion;  // n*d entries, row-major
};

/// Non-anticipative coefficients b_t(omega, x) in R^n and sigma_t(omega, x)
/// in R^{n x d}. Evaluation at node i must only read nodes <= i.
class CoefficientModel {
 public:
  virtual ~CoefficientModel() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t noise_dim() const = 0;
  virtual std::size_t state_dim() const = 0;

  virtual void drift(std::size_t node, const DiscretePath& omega, const DiscretePath& x,
                     std::span<double> out) const = 0;
  /// Row-major n x d.
  virtual void diffusion(std::size_t node, const DiscretePath& omega, const DiscretePath& x,
                         std::span<double> out) const = 0;
  /// Small-noise drift b^eps; the limit flow always uses drift().
  virtual void drift_eps(double eps, std::size_t node, const DiscretePath& omega,
                         const DiscretePath& x, std::span<double> out) const {
    (void)eps;
    drift(node, omega, x, out);
  }

  virtual bool has_partials() const { return false; }
  /// Appends the nonzero partial derivatives of (b, sigma) at `node`.
  virtual void partials(std::size_t node, const DiscretePath& omega, const DiscretePath& x,
                        std::vector<CoefficientPartial>& out) const;

  /// Set when sigma is a scalar constant (n = d = 1), enabling the
  /// Brownian-bridge exit correction.
  virtual std::optional<double> constant_scalar_diffusion() const { return std::nullopt; }

  virtual ModelBounds bounds() const = 0;
};

/// Scalar volatility functional sigma_t(x) of a one-dimensional state path.
class VolFunctional {
 public:
  virtual ~VolFunctional() = default;
  virtual std::string kind() const = 0;
  virtual double value(std::size_t node, const DiscretePath& x) const = 0;
  /// Appends (node, d sigma / d x_node) pairs.
  virtual void partials(std::size_t node, const DiscretePath& x,
                        std::vector<std::pair<std::size_t, double>>& out) const = 0;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual double lipschitz() const = 0;
  /// Declares sigma_{ct}(x) = sigma_t(x^c) with x^c_s = x_{cs}.
  virtual bool time_indifferent() const = 0;
  virtual bool constant() const { return false; }
};

using VolPtr = std::shared_ptr<const VolFunctional>;

// Volatility functionals. The state-dependent ones are
// center + amplitude * tanh(.) and so live in [center - |amplitude|, center + |amplitude|].
VolPtr constant_vol(double sigma);
/// center + amplitude * tanh(x_t).
VolPtr local_vol(double center, double amplitude);
/// center + amplitude * tanh(max_{s <= t} x_s).
VolPtr running_max_vol(double center, double amplitude);
/// center + amplitude * tanh(x_{(t - delay) v 0}).
VolPtr delay_vol(double center, double amplitude, double delay);
/// (1 + slope * t) * base: explicitly time dependent.
VolPtr time_scaled_vol(double base, double slope);

/// dX = b dt + sigma dB with constant coefficients (b in R^n, sigma n x d).
class ConstantModel final : public CoefficientModel {
 public:
  ConstantModel(std::vector<double> drift, std::vector<double> diffusion, std::size_t noise_dim);
  static std::shared_ptr<ConstantModel> scalar(double drift, double sigma);

  std::string kind() const override { return "constant"; }
  std::size_t noise_dim() const override { return d_; }
  std::size_t state_dim() const override { return drift_.size(); }
  void drift(std::size_t, const DiscretePath&, const DiscretePath&,
             std::span<double> out) const override;
  void diffusion(std::size_t, const DiscretePath&, const DiscretePath&,
                 std::span<double> out) const override;
  bool has_partials() const override { return true; }
  void partials(std::size_t, const DiscretePath&, const DiscretePath&,
                std::vector<CoefficientPartial>&) const override {}
  std::optional<double> constant_scalar_diffusion() const override;
  ModelBounds bounds() const override;

 private:
  std::vector<double> drift_;
  std::vector<double> diffusion_;
  std::size_t d_;
};

/// Scalar mean reversion b = kappa (mean - x_t) with constant sigma.
/// Lipschitz but unbounded drift, so only the Laplace results apply.
class LinearDriftModel final : public CoefficientModel {
 public:
  LinearDriftModel(double kappa, double mean, double sigma);

  std::string kind() const override { return "linear_drift"; }
  std::size_t noise_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  void drift(std::size_t node, const DiscretePath&, const DiscretePath& x,
             std::span<double> out) const override;
  void diffusion(std::size_t, const DiscretePath&, const DiscretePath&,
                 std::span<double> out) const override;
  bool has_partials() const override { return true; }
  void partials(std::size_t node, const DiscretePath&, const DiscretePath&,
                std::vector<CoefficientPartial>& out) const override;
  std::optional<double> constant_scalar_diffusion() const override { return sigma_; }
  ModelBounds bounds() const override;

 private:
  double kappa_, mean_, sigma_;
};

/// Scalar dX = b dt + sigma_t(X) dB with a volatility functional and
/// constant drift.
class ScalarVolModel final : public CoefficientModel {
 public:
  explicit ScalarVolModel(VolPtr vol, double drift = 0.0);

  std::string kind() const override { return "scalar_vol:" + vol_->kind(); }
  std::size_t noise_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  void drift(std::size_t, const DiscretePath&, const DiscretePath&,
             std::span<double> out) const override;
  void diffusion(std::size_t node, const DiscretePath&, const DiscretePath& x,
                 std::span<double> out) const override;
  bool has_partials() const override { return true; }
  void partials(std::size_t node, const DiscretePath&, const DiscretePath& x,
                std::vector<CoefficientPartial>& out) const override;
  std::optional<double> constant_scalar_diffusion() const override;
  ModelBounds bounds() const override;
  const VolFunctional& vol() const { return *vol_; }

 private:
  VolPtr vol_;
  double drift_;
};

/// Log-price X = ln(S/S0) of a driftless asset: b^eps = -(eps/2) sigma^2,
/// limit drift b^0 = 0.
class LogPriceModel final : public CoefficientModel {
 public:
  explicit LogPriceModel(VolPtr vol);

  std::string kind() const override { return "log_price:" + vol_->kind(); }
  std::size_t noise_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  void drift(std::size_t, const DiscretePath&, const DiscretePath&,
             std::span<double> out) const override;
  void diffusion(std::size_t node, const DiscretePath&, const DiscretePath& x,
                 std::span<double> out) const override;
  void drift_eps(double eps, std::size_t node, const DiscretePath& omega,
                 const DiscretePath& x, std::span<double> out) const override;
  bool has_partials() const override { return true; }
  void partials(std::size_t node, const DiscretePath&, const DiscretePath& x,
                std::vector<CoefficientPartial>& out) const override;
  std::optional<double> constant_scalar_diffusion() const override;
  ModelBounds bounds() const override;
  const VolFunctional& vol() const { return *vol_; }
  VolPtr vol_ptr() const { return vol_; }

 private:
  VolPtr vol_;
};

// ---------------------------------------------------------------------------
// Terminal functionals xi(omega, x) over the whole horizon.

struct PathSensitivity {
  std::size_t node;
  PathSide side;
  std::size_t component;
  double value;
};

class TerminalFunctional {
 public:
  virtual ~TerminalFunctional() = default;
  virtual std::string kind() const = 0;
  virtual double value(const DiscretePath& omega, const DiscretePath& x) const = 0;
  virtual bool has_gradient() const { return false; }
  /// Appends the nonzero partial derivatives with respect to path values.
  virtual void gradient(const DiscretePath& omega, const DiscretePath& x,
                        std::vector<PathSensitivity>& out) const;
  /// |xi| <= bound().
  virtual double bound() const = 0;
  virtual double lipschitz() const = 0;
};

class ConstantPayoff final : public TerminalFunctional {
 public:
  explicit ConstantPayoff(double c) : c_(c) {}
  std::string kind() const override { return "constant"; }
  double value(const DiscretePath&, const DiscretePath&) const override { return c_; }
  bool has_gradient() const override { return true; }
  void gradient(const DiscretePath&, const DiscretePath&,
                std::vector<PathSensitivity>&) const override {}
  double bound() const override { return std::abs(c_); }
  double lipschitz() const override { return 0.0; }

 private:
  double c_;
};

/// clamp(lambda . x_T, -cap, cap); cap may be infinite.
class ClippedLinear final : public TerminalFunctional {
 public:
  ClippedLinear(std::vector<double> weights, double cap);
  std::string kind() const override { return "clipped_linear"; }
  double value(const DiscretePath& omega, const DiscretePath& x) const override;
  bool has_gradient() const override { return true; }
  void gradient(const DiscretePath& omega, const DiscretePath& x,
                std::vector<PathSensitivity>& out) const override;
  double bound() const override { return cap_; }
  double lipschitz() const override;

 private:
  double raw(const DiscretePath& x) const;
  std::vector<double> weights_;
  double cap_;
};

/// clamp(lambda * max_t x_t, -cap, cap) on the first state component.
class RunningMaxPayoff final : public TerminalFunctional {
 public:
  RunningMaxPayoff(double lambda, double cap);
  std::string kind() const override { return "running_max"; }
  double value(const DiscretePath& omega, const DiscretePath& x) const override;
  bool has_gradient() const override { return true; }
  void gradient(const DiscretePath& omega, const DiscretePath& x,
                std::vector<PathSensitivity>& out) const override;
  double bound() const override { return cap_; }
  double lipschitz() const override { return std::abs(lambda_); }

 private:
  double lambda_, cap_;
};

/// min((e^{x_T} - e^k)^+, cap). Default cap e^{10 (1 + |k|)}.
class ClippedCall final : public TerminalFunctional {
 public:
  explicit ClippedCall(double log_strike, std::optional<double> cap = std::nullopt);
  std::string kind() const override { return "clipped_call"; }
  double value(const DiscretePath& omega, const DiscretePath& x) const override;
  bool has_gradient() const override { return true; }
  void gradient(const DiscretePath& omega, const DiscretePath& x,
                std::vector<PathSensitivity>& out) const override;
  double bound() const override { return cap_; }
  double lipschitz() const override;
  double log_strike() const { return k_; }
  /// ln((e^{x} - e^k)^+) without the cap; -inf when out of the money.
  static double log_payoff(double x, double log_strike);

 private:
  double k_, cap_;
};

// ---------------------------------------------------------------------------
// Exit domains: bounded open sets O in R^n.

class Domain {
 public:
  virtual ~Domain() = default;
  virtual std::string kind() const = 0;
  virtual std::size_t dim() const = 0;
  /// Negative inside, zero on the boundary, positive outside.
  virtual double signed_distance(std::span<const double> x) const = 0;
  /// Gradient of signed_distance where it is differentiable; at ties the
  /// same branch as boundary_project is used.
  virtual std::vector<double> signed_distance_gradient(std::span<const double> x) const = 0;
  /// Nearest boundary point. Ties go to the upper face / first axis.
  virtual std::vector<double> boundary_project(std::span<const double> x) const = 0;
  /// O is contained in the ball of this radius around the origin.
  virtual double radius() const = 0;
  virtual std::optional<std::pair<double, double>> interval_bounds() const {
    return std::nullopt;
  }

  bool inside(std::span<const double> x) const { return signed_distance(x) < 0.0; }
  /// d(x, O^c): zero outside and on the boundary.
  double distance_to_complement(std::span<const double> x) const {
    return std::max(0.0, -signed_distance(x));
  }
};

class Interval final : public Domain {
 public:
  Interval(double lower, double upper);
  std::string kind() const override { return "interval"; }
  std::size_t dim() const override { return 1; }
  double signed_distance(std::span<const double> x) const override;
  std::vector<double> signed_distance_gradient(std::span<const double> x) const override;
  std::vector<double> boundary_project(std::span<const double> x) const override;
  double radius() const override;
  std::optional<std::pair<double, double>> interval_bounds() const override {
    return std::make_pair(lower_, upper_);
  }

 private:
  double lower_, upper_;
};

class Ball final : public Domain {
 public:
  Ball(std::vector<double> center, double radius);
  std::string kind() const override { return "ball"; }
  std::size_t dim() const override { return center_.size(); }
  double signed_distance(std::span<const double> x) const override;
  std::vector<double> signed_distance_gradient(std::span<const double> x) const override;
  std::vector<double> boundary_project(std::span<const double> x) const override;
  double radius() const override;

 private:
  std::vector<double> center_;
  double r_;
};

class Box final : public Domain {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);
  std::string kind() const override { return "box"; }
  std::size_t dim() const override { return lower_.size(); }
  double signed_distance(std::span<const double> x) const override;
  std::vector<double> signed_distance_gradient(std::span<const double> x) const override;
  std::vector<double> boundary_project(std::span<const double> x) const override;
  double radius() const override;

 private:
  // Nearest face from inside: (axis, upper?).
  std::pair<std::size_t, bool> nearest_face(std::span<const double> x) const;
  std::vector<double> lower_, upper_;
};

// ---------------------------------------------------------------------------
// Sampling checks of the declared structure.

struct NonanticipationReport {
  std::size_t trials = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Perturbs path values strictly after a random node and checks that drift
/// and diffusion at that node are unchanged (exact equality).
NonanticipationReport check_nonanticipative(const CoefficientModel& model, std::size_t trials,
                                            std::uint64_t seed);

/// Largest sampled |f(theta) - f(theta')| / (||omega - omega'||_t + ||x - x'||_t)
/// over drift (Euclidean) and diffusion (Frobenius).
double estimate_lipschitz(const CoefficientModel& model, std::size_t trials, std::uint64_t seed);

/// Largest sampled |xi(w1) - xi(w2)| / ||w1 - w2|| with the joint sup norm.
double estimate_lipschitz(const TerminalFunctional& payoff, std::size_t noise_dim,
                          std::size_t state_dim, std::size_t trials, std::uint64_t seed);

/// Smallest sampled eigenvalue of sigma sigma^T.
double sampled_ellipticity(const CoefficientModel& model, std::size_t trials, std::uint64_t seed);

}  // namespace ldplab
