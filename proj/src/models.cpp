#include "ldplab/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldplab/rng.hpp"

namespace ldplab {

void CoefficientModel::partials(std::size_t, const DiscretePath&, const DiscretePath&,
                                std::vector<CoefficientPartial>&) const {
  throw std::logic_error("model " + kind() + " has no closed-form partials");
}

void TerminalFunctional::gradient(const DiscretePath&, const DiscretePath&,
                                  std::vector<PathSensitivity>&) const {
  throw std::logic_error("payoff " + kind() + " has no closed-form gradient");
}

// ---------------------------------------------------------------------------
// Volatility functionals

namespace {

double sech2(double z) {
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

class ConstantVol final : public VolFunctional {
 public:
  explicit ConstantVol(double s) : s_(s) {}
  std::string kind() const override { return "constant"; }
  double value(std::size_t, const DiscretePath&) const override { return s_; }
  void partials(std::size_t, const DiscretePath&,
                std::vector<std::pair<std::size_t, double>>&) const override {}
  double lower() const override { return std::abs(s_); }
  double upper() const override { return std::abs(s_); }
  double lipschitz() const override { return 0.0; }
  bool time_indifferent() const override { return true; }
  bool constant() const override { return true; }

 private:
  double s_;
};

class TanhVol : public VolFunctional {
 public:
  TanhVol(double center, double amplitude) : c_(center), a_(amplitude) {}
  double lower() const override { return c_ - std::abs(a_); }
  double upper() const override { return c_ + std::abs(a_); }
  double lipschitz() const override { return std::abs(a_); }

 protected:
  double c_, a_;
};

class LocalVol final : public TanhVol {
 public:
  using TanhVol::TanhVol;
  std::string kind() const override { return "local_vol"; }
  double value(std::size_t node, const DiscretePath& x) const override {
    return c_ + a_ * std::tanh(x(node, 0));
  }
  void partials(std::size_t node, const DiscretePath& x,
                std::vector<std::pair<std::size_t, double>>& out) const override {
    out.emplace_back(node, a_ * sech2(x(node, 0)));
  }
  bool time_indifferent() const override { return true; }
};

class RunningMaxVol final : public TanhVol {
 public:
  using TanhVol::TanhVol;
  std::string kind() const override { return "running_max_vol"; }
  double value(std::size_t node, const DiscretePath& x) const override {
    return c_ + a_ * std::tanh(x(argmax(node, x), 0));
  }
  void partials(std::size_t node, const DiscretePath& x,
                std::vector<std::pair<std::size_t, double>>& out) const override {
    const std::size_t k = argmax(node, x);
    out.emplace_back(k, a_ * sech2(x(k, 0)));
  }
  bool time_indifferent() const override { return true; }

 private:
  // First node attaining the running maximum up to `node`.
  static std::size_t argmax(std::size_t node, const DiscretePath& x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i <= node; ++i)
      if (x(i, 0) > x(best, 0)) best = i;
    return best;
  }
};

class DelayVol final : public TanhVol {
 public:
  DelayVol(double center, double amplitude, double delay)
      : TanhVol(center, amplitude), delay_(delay) {
    if (!(delay >= 0.0)) throw std::invalid_argument("delay_vol: delay must be >= 0");
  }
  std::string kind() const override { return "delay_vol"; }
  double value(std::size_t node, const DiscretePath& x) const override {
    return c_ + a_ * std::tanh(x(lagged(node, x), 0));
  }
  void partials(std::size_t node, const DiscretePath& x,
                std::vector<std::pair<std::size_t, double>>& out) const override {
    const std::size_t k = lagged(node, x);
    out.emplace_back(k, a_ * sech2(x(k, 0)));
  }
  bool time_indifferent() const override { return delay_ == 0.0; }

 private:
  std::size_t lagged(std::size_t node, const DiscretePath& x) const {
    const auto lag = static_cast<std::size_t>(std::lround(delay_ / x.grid().dt()));
    return node > lag ? node - lag : 0;
  }
  double delay_;
};

class TimeScaledVol final : public VolFunctional {
 public:
  TimeScaledVol(double base, double slope) : base_(base), slope_(slope) {}
  std::string kind() const override { return "time_scaled_vol"; }
  double value(std::size_t node, const DiscretePath& x) const override {
    return (1.0 + slope_ * x.grid().time(node)) * base_;
  }
  void partials(std::size_t, const DiscretePath&,
                std::vector<std::pair<std::size_t, double>>&) const override {}
  double lower() const override { return slope_ >= 0.0 ? std::abs(base_) : 0.0; }
  double upper() const override { return slope_ > 0.0 ? kUnbounded : std::abs(base_); }
  double lipschitz() const override { return 0.0; }
  bool time_indifferent() const override { return slope_ == 0.0; }

 private:
  double base_, slope_;
};

}  // namespace

VolPtr constant_vol(double sigma) { return std::make_shared<ConstantVol>(sigma); }
VolPtr local_vol(double center, double amplitude) {
  return std::make_shared<LocalVol>(center, amplitude);
}
VolPtr running_max_vol(double center, double amplitude) {
  return std::make_shared<RunningMaxVol>(center, amplitude);
}
VolPtr delay_vol(double center, double amplitude, double delay) {
  return std::make_shared<DelayVol>(center, amplitude, delay);
}
VolPtr time_scaled_vol(double base, double slope) {
  return std::make_shared<TimeScaledVol>(base, slope);
}

// ---------------------------------------------------------------------------
// Coefficient models

ConstantModel::ConstantModel(std::vector<double> drift, std::vector<double> diffusion,
                             std::size_t noise_dim)
    : drift_(std::move(drift)), diffusion_(std::move(diffusion)), d_(noise_dim) {
  if (drift_.empty() || d_ == 0 || diffusion_.size() != drift_.size() * d_)
    throw std::invalid_argument("ConstantModel: diffusion must be n x d with n = drift size");
}

std::shared_ptr<ConstantModel> ConstantModel::scalar(double drift, double sigma) {
  return std::make_shared<ConstantModel>(std::vector{drift}, std::vector{sigma}, 1);
}

void ConstantModel::drift(std::size_t, const DiscretePath&, const DiscretePath&,
                          std::span<double> out) const {
  std::copy(drift_.begin(), drift_.end(), out.begin());
}

void ConstantModel::diffusion(std::size_t, const DiscretePath&, const DiscretePath&,
                              std::span<double> out) const {
  std::copy(diffusion_.begin(), diffusion_.end(), out.begin());
}

std::optional<double> ConstantModel::constant_scalar_diffusion() const {
  if (drift_.size() == 1 && d_ == 1) return diffusion_[0];
  return std::nullopt;
}

ModelBounds ConstantModel::bounds() const {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      sigma(diffusion_.data(), static_cast<Eigen::Index>(drift_.size()),
            static_cast<Eigen::Index>(d_));
  const Eigen::MatrixXd a = sigma * sigma.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  double b = 0.0;
  for (double v : drift_) b += v * v;
  return ModelBounds{0.0, std::sqrt(b), sigma.norm(), std::max(0.0, eig.eigenvalues()(0))};
}

LinearDriftModel::LinearDriftModel(double kappa, double mean, double sigma)
    : kappa_(kappa), mean_(mean), sigma_(sigma) {}

void LinearDriftModel::drift(std::size_t node, const DiscretePath&, const DiscretePath& x,
                             std::span<double> out) const {
  out[0] = kappa_ * (mean_ - x(node, 0));
}

void LinearDriftModel::diffusion(std::size_t, const DiscretePath&, const DiscretePath&,
                                 std::span<double> out) const {
  out[0] = sigma_;
}

void LinearDriftModel::partials(std::size_t node, const DiscretePath&, const DiscretePath&,
                                std::vector<CoefficientPartial>& out) const {
  out.push_back({node, PathSide::state, 0, {-kappa_}, {0.0}});
}

ModelBounds LinearDriftModel::bounds() const {
  return ModelBounds{std::abs(kappa_), kUnbounded, std::abs(sigma_), sigma_ * sigma_};
}

ScalarVolModel::ScalarVolModel(VolPtr vol, double drift) : vol_(std::move(vol)), drift_(drift) {
  if (!vol_) throw std::invalid_argument("ScalarVolModel: null volatility");
}

void ScalarVolModel::drift(std::size_t, const DiscretePath&, const DiscretePath&,
                           std::span<double> out) const {
  out[0] = drift_;
}

void ScalarVolModel::diffusion(std::size_t node, const DiscretePath&, const DiscretePath& x,
                               std::span<double> out) const {
  out[0] = vol_->value(node, x);
}

void ScalarVolModel::partials(std::size_t node, const DiscretePath&, const DiscretePath& x,
                              std::vector<CoefficientPartial>& out) const {
  std::vector<std::pair<std::size_t, double>> dv;
  vol_->partials(node, x, dv);
  for (const auto& [k, v] : dv) out.push_back({k, PathSide::state, 0, {0.0}, {v}});
}

std::optional<double> ScalarVolModel::constant_scalar_diffusion() const {
  if (vol_->constant()) return vol_->upper();
  return std::nullopt;
}

ModelBounds ScalarVolModel::bounds() const {
  const double lo = vol_->lower();
  return ModelBounds{vol_->lipschitz(), std::abs(drift_), vol_->upper(),
                     lo > 0.0 ? lo * lo : 0.0};
}

LogPriceModel::LogPriceModel(VolPtr vol) : vol_(std::move(vol)) {
  if (!vol_) throw std::invalid_argument("LogPriceModel: null volatility");
}

void LogPriceModel::drift(std::size_t, const DiscretePath&, const DiscretePath&,
                          std::span<double> out) const {
  out[0] = 0.0;
}

void LogPriceModel::diffusion(std::size_t node, const DiscretePath&, const DiscretePath& x,
                              std::span<double> out) const {
  out[0] = vol_->value(node, x);
}

void LogPriceModel::drift_eps(double eps, std::size_t node, const DiscretePath&,
                              const DiscretePath& x, std::span<double> out) const {
  const double s = vol_->value(node, x);
  out[0] = -0.5 * eps * s * s;
}

void LogPriceModel::partials(std::size_t node, const DiscretePath&, const DiscretePath& x,
                             std::vector<CoefficientPartial>& out) const {
  std::vector<std::pair<std::size_t, double>> dv;
  vol_->partials(node, x, dv);
  for (const auto& [k, v] : dv) out.push_back({k, PathSide::state, 0, {0.0}, {v}});
}

std::optional<double> LogPriceModel::constant_scalar_diffusion() const {
  if (vol_->constant()) return vol_->upper();
  return std::nullopt;
}

ModelBounds LogPriceModel::bounds() const {
  // Covers b^eps for eps in [0, 1): |b^eps| <= sigma^2 / 2.
  const double hi = vol_->upper();
  const double lo = vol_->lower();
  return ModelBounds{vol_->lipschitz() * std::max(1.0, hi), 0.5 * hi * hi, hi,
                     lo > 0.0 ? lo * lo : 0.0};
}

// ---------------------------------------------------------------------------
// Terminal functionals

ClippedLinear::ClippedLinear(std::vector<double> weights, double cap)
    : weights_(std::move(weights)), cap_(cap) {
  if (weights_.empty()) throw std::invalid_argument("ClippedLinear: empty weights");
  if (!(cap > 0.0)) throw std::invalid_argument("ClippedLinear: cap must be positive");
}

double ClippedLinear::raw(const DiscretePath& x) const {
  if (x.dim() != weights_.size())
    throw std::invalid_argument("ClippedLinear: weight/state dimension mismatch");
  const auto last = x.at(x.nodes() - 1);
  double s = 0.0;
  for (std::size_t c = 0; c < weights_.size(); ++c) s += weights_[c] * last[c];
  return s;
}

double ClippedLinear::value(const DiscretePath&, const DiscretePath& x) const {
  return std::clamp(raw(x), -cap_, cap_);
}

void ClippedLinear::gradient(const DiscretePath&, const DiscretePath& x,
                             std::vector<PathSensitivity>& out) const {
  if (std::abs(raw(x)) >= cap_) return;
  for (std::size_t c = 0; c < weights_.size(); ++c)
    out.push_back({x.nodes() - 1, PathSide::state, c, weights_[c]});
}

double ClippedLinear::lipschitz() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return std::sqrt(s);
}

RunningMaxPayoff::RunningMaxPayoff(double lambda, double cap) : lambda_(lambda), cap_(cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("RunningMaxPayoff: cap must be positive");
}

double RunningMaxPayoff::value(const DiscretePath&, const DiscretePath& x) const {
  double m = x(0, 0);
  for (std::size_t i = 1; i < x.nodes(); ++i) m = std::max(m, x(i, 0));
  return std::clamp(lambda_ * m, -cap_, cap_);
}

void RunningMaxPayoff::gradient(const DiscretePath&, const DiscretePath& x,
                                std::vector<PathSensitivity>& out) const {
  // Ties go to the latest maximizer: from a flat path the first node has no
  // sensitivity to the control and descent would stall there.
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.nodes(); ++i)
    if (x(i, 0) >= x(best, 0)) best = i;
  if (std::abs(lambda_ * x(best, 0)) >= cap_) return;
  out.push_back({best, PathSide::state, 0, lambda_});
}

ClippedCall::ClippedCall(double log_strike, std::optional<double> cap)
    : k_(log_strike), cap_(cap.value_or(std::exp(10.0 * (1.0 + std::abs(log_strike))))) {
  if (!(cap_ > 0.0)) throw std::invalid_argument("ClippedCall: cap must be positive");
}

double ClippedCall::log_payoff(double x, double log_strike) {
  if (x <= log_strike) return -kUnbounded;
  return x + std::log1p(-std::exp(log_strike - x));
}

double ClippedCall::value(const DiscretePath&, const DiscretePath& x) const {
  const double xt = x(x.nodes() - 1, 0);
  if (xt <= k_) return 0.0;
  return std::min(std::exp(xt) - std::exp(k_), cap_);
}

void ClippedCall::gradient(const DiscretePath&, const DiscretePath& x,
                           std::vector<PathSensitivity>& out) const {
  const double xt = x(x.nodes() - 1, 0);
  if (xt <= k_ || std::exp(xt) - std::exp(k_) >= cap_) return;
  out.push_back({x.nodes() - 1, PathSide::state, 0, std::exp(xt)});
}

double ClippedCall::lipschitz() const { return cap_ + std::exp(k_); }

// ---------------------------------------------------------------------------
// Domains

Interval::Interval(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower < upper)) throw std::invalid_argument("Interval: need lower < upper");
}

double Interval::signed_distance(std::span<const double> x) const {
  return std::max(lower_ - x[0], x[0] - upper_);
}

std::vector<double> Interval::signed_distance_gradient(std::span<const double> x) const {
  return {(lower_ - x[0] > x[0] - upper_) ? -1.0 : 1.0};
}

std::vector<double> Interval::boundary_project(std::span<const double> x) const {
  return {(x[0] - lower_ < upper_ - x[0]) ? lower_ : upper_};
}

double Interval::radius() const { return std::max(std::abs(lower_), std::abs(upper_)); }

Ball::Ball(std::vector<double> center, double radius) : center_(std::move(center)), r_(radius) {
  if (center_.empty() || !(radius > 0.0))
    throw std::invalid_argument("Ball: need a center and a positive radius");
}

namespace {
// Unit vector from c to x; the first axis when x == c.
std::vector<double> direction(std::span<const double> x, const std::vector<double>& c,
                              double& dist) {
  std::vector<double> u(c.size());
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    u[i] = x[i] - c[i];
    s += u[i] * u[i];
  }
  dist = std::sqrt(s);
  if (dist == 0.0) {
    std::fill(u.begin(), u.end(), 0.0);
    u[0] = 1.0;
  } else {
    for (double& v : u) v /= dist;
  }
  return u;
}
}  // namespace

double Ball::signed_distance(std::span<const double> x) const {
  double dist = 0.0;
  direction(x, center_, dist);
  return dist - r_;
}

std::vector<double> Ball::signed_distance_gradient(std::span<const double> x) const {
  double dist = 0.0;
  return direction(x, center_, dist);
}

std::vector<double> Ball::boundary_project(std::span<const double> x) const {
  double dist = 0.0;
  auto u = direction(x, center_, dist);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = center_[i] + r_ * u[i];
  return u;
}

double Ball::radius() const {
  double s = 0.0;
  for (double c : center_) s += c * c;
  return std::sqrt(s) + r_;
}

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw std::invalid_argument("Box: bounds must have equal positive length");
  for (std::size_t i = 0; i < lower_.size(); ++i)
    if (!(lower_[i] < upper_[i])) throw std::invalid_argument("Box: need lower < upper");
}

std::pair<std::size_t, bool> Box::nearest_face(std::span<const double> x) const {
  std::size_t axis = 0;
  bool up = true;
  double best = kUnbounded;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    const double to_upper = upper_[i] - x[i];
    const double to_lower = x[i] - lower_[i];
    if (to_upper < best) {
      best = to_upper;
      axis = i;
      up = true;
    }
    if (to_lower < best) {
      best = to_lower;
      axis = i;
      up = false;
    }
  }
  return {axis, up};
}

double Box::signed_distance(std::span<const double> x) const {
  double outside = 0.0;
  double depth = kUnbounded;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    const double excess = std::max({lower_[i] - x[i], x[i] - upper_[i], 0.0});
    outside += excess * excess;
    depth = std::min({depth, x[i] - lower_[i], upper_[i] - x[i]});
  }
  if (outside > 0.0) return std::sqrt(outside);
  return -depth;
}

std::vector<double> Box::signed_distance_gradient(std::span<const double> x) const {
  std::vector<double> g(lower_.size(), 0.0);
  const double sd = signed_distance(x);
  if (sd > 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = (x[i] - std::clamp(x[i], lower_[i], upper_[i])) / sd;
    return g;
  }
  const auto [axis, up] = nearest_face(x);
  g[axis] = up ? 1.0 : -1.0;
  return g;
}

std::vector<double> Box::boundary_project(std::span<const double> x) const {
  std::vector<double> p(x.begin(), x.end());
  if (signed_distance(x) > 0.0) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lower_[i], upper_[i]);
    return p;
  }
  const auto [axis, up] = nearest_face(x);
  p[axis] = up ? upper_[axis] : lower_[axis];
  return p;
}

double Box::radius() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    const double m = std::max(std::abs(lower_[i]), std::abs(upper_[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Sampling checks

namespace {

// Deterministic stream of draws for the property checks.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : normals_(seed) {}
  double normal() { return normals_.normal(1, counter_++, 0); }
  double uniform() { return normals_.uniform(2, counter_++, 0); }
  std::size_t index(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }

 private:
  CounterNormals normals_;
  std::uint32_t counter_ = 0;
};

DiscretePath random_walk(const TimeGrid& grid, std::size_t dim, double start_scale,
                         double step_scale, Draws& draws) {
  DiscretePath p(grid, dim);
  for (std::size_t c = 0; c < dim; ++c) p(0, c) = start_scale * draws.normal();
  const double s = step_scale * std::sqrt(grid.dt());
  for (std::size_t i = 1; i < p.nodes(); ++i)
    for (std::size_t c = 0; c < dim; ++c) p(i, c) = p(i - 1, c) + s * draws.normal();
  return p;
}

double sup_distance_to(const DiscretePath& a, const DiscretePath& b, std::size_t last) {
  double m = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.dim(); ++c) {
      const double d = a(i, c) - b(i, c);
      s += d * d;
    }
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

struct Coefficients {
  std::vector<double> b, sigma;
};

Coefficients evaluate(const CoefficientModel& m, std::size_t node, const DiscretePath& omega,
                      const DiscretePath& x) {
  Coefficients c{std::vector<double>(m.state_dim()),
                 std::vector<double>(m.state_dim() * m.noise_dim())};
  m.drift(node, omega, x, c.b);
  m.diffusion(node, omega, x, c.sigma);
  return c;
}

double euclid_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

NonanticipationReport check_nonanticipative(const CoefficientModel& model, std::size_t trials,
                                            std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_nonanticipative: trials must be >= 1");
  Draws draws(seed);
  NonanticipationReport report;
  report.trials = trials;
  const TimeGrid grid(1.0, 16);
  for (std::size_t t = 0; t < trials; ++t) {
    const DiscretePath omega = random_walk(grid, model.noise_dim(), 0.0, 1.0, draws);
    const DiscretePath x = random_walk(grid, model.state_dim(), 1.0, 1.0, draws);
    const std::size_t node = draws.index(grid.steps());
    DiscretePath omega2 = omega;
    DiscretePath x2 = x;
    for (std::size_t i = node + 1; i < omega.nodes(); ++i) {
      for (std::size_t c = 0; c < omega.dim(); ++c) omega2(i, c) += 1.0 + draws.normal();
      for (std::size_t c = 0; c < x.dim(); ++c) x2(i, c) += 1.0 + draws.normal();
    }
    const auto a = evaluate(model, node, omega, x);
    const auto b = evaluate(model, node, omega2, x2);
    if (a.b != b.b || a.sigma != b.sigma) {
      std::ostringstream msg;
      msg << "trial " << t << ": coefficients at node " << node
          << " changed when only later path values were perturbed";
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

double estimate_lipschitz(const CoefficientModel& model, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("estimate_lipschitz: trials must be >= 1");
  Draws draws(seed);
  const TimeGrid grid(1.0, 16);
  const double scales[] = {1e-3, 1e-2, 1e-1, 1.0};
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const DiscretePath omega = random_walk(grid, model.noise_dim(), 0.0, 1.0, draws);
    const DiscretePath x = random_walk(grid, model.state_dim(), 1.0, 1.0, draws);
    const double scale = scales[t % 4];
    DiscretePath omega2 = omega;
    DiscretePath x2 = x;
    for (std::size_t i = 1; i < omega.nodes(); ++i)
      for (std::size_t c = 0; c < omega.dim(); ++c) omega2(i, c) += scale * draws.normal();
    for (std::size_t i = 0; i < x.nodes(); ++i)
      for (std::size_t c = 0; c < x.dim(); ++c) x2(i, c) += scale * draws.normal();
    const std::size_t node = draws.index(grid.steps() + 1);
    const double dist =
        sup_distance_to(omega, omega2, node) + sup_distance_to(x, x2, node);
    if (dist == 0.0) continue;
    const auto a = evaluate(model, node, omega, x);
    const auto b = evaluate(model, node, omega2, x2);
    worst = std::max({worst, euclid_diff(a.b, b.b) / dist, euclid_diff(a.sigma, b.sigma) / dist});
  }
  return worst;
}

double estimate_lipschitz(const TerminalFunctional& payoff, std::size_t noise_dim,
                          std::size_t state_dim, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("estimate_lipschitz: trials must be >= 1");
  Draws draws(seed);
  const TimeGrid grid(1.0, 16);
  const double scales[] = {1e-3, 1e-2, 1e-1, 1.0};
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const DiscretePath omega = random_walk(grid, noise_dim, 0.0, 1.0, draws);
    const DiscretePath x = random_walk(grid, state_dim, 0.5, 1.0, draws);
    const double scale = scales[t % 4];
    DiscretePath omega2 = omega;
    DiscretePath x2 = x;
    for (std::size_t i = 0; i < x.nodes(); ++i) {
      for (std::size_t c = 0; c < noise_dim; ++c) omega2(i, c) += scale * draws.normal();
      for (std::size_t c = 0; c < state_dim; ++c) x2(i, c) += scale * draws.normal();
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < x.nodes(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < noise_dim; ++c) s += std::pow(omega(i, c) - omega2(i, c), 2);
      for (std::size_t c = 0; c < state_dim; ++c) s += std::pow(x(i, c) - x2(i, c), 2);
      dist = std::max(dist, std::sqrt(s));
    }
    if (dist == 0.0) continue;
    worst = std::max(worst,
                     std::abs(payoff.value(omega, x) - payoff.value(omega2, x2)) / dist);
  }
  return worst;
}

double sampled_ellipticity(const CoefficientModel& model, std::size_t trials,
                           std::uint64_t seed) {
  Draws draws(seed);
  const TimeGrid grid(1.0, 16);
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  const auto d = static_cast<Eigen::Index>(model.noise_dim());
  double smallest = kUnbounded;
  for (std::size_t t = 0; t < trials; ++t) {
    const DiscretePath omega = random_walk(grid, model.noise_dim(), 0.0, 1.0, draws);
    const DiscretePath x = random_walk(grid, model.state_dim(), 1.0, 1.0, draws);
    const auto c = evaluate(model, draws.index(grid.steps() + 1), omega, x);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        sigma(c.sigma.data(), n, d);
    const Eigen::MatrixXd a = sigma * sigma.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    smallest = std::min(smallest, eig.eigenvalues()(0));
  }
  return smallest;
}

}  // namespace ldplab
