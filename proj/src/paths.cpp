#include "ldplab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ldplab {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
  if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  dt_ = horizon / static_cast<double>(steps);
}

double TimeGrid::time(std::size_t node) const {
  if (node > steps_) throw std::out_of_range("TimeGrid::time: node past horizon");
  if (node == steps_) return horizon_;
  return static_cast<double>(node) * dt_;
}

std::size_t TimeGrid::node_of(double t) const {
  if (!(t >= -1e-9 * dt_) || t > horizon_ + 1e-9 * dt_)
    throw std::invalid_argument("TimeGrid::node_of: time outside [0, T]");
  const double scaled = t / dt_;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, rounded))
    throw std::invalid_argument("TimeGrid::node_of: time is not a grid node");
  return static_cast<std::size_t>(rounded);
}

TimeGrid TimeGrid::tail_from(std::size_t node) const {
  if (node >= steps_) throw std::invalid_argument("TimeGrid::tail_from: empty tail");
  return TimeGrid(horizon_ - time(node), steps_ - node);
}

TimeGrid TimeGrid::head_to(std::size_t node) const {
  if (node == 0 || node > steps_)
    throw std::invalid_argument("TimeGrid::head_to: node out of range");
  return TimeGrid(time(node), node);
}

bool TimeGrid::compatible_with(const TimeGrid& other) const noexcept {
  return steps_ == other.steps_ && std::abs(dt_ - other.dt_) <= 1e-12 * dt_;
}

DiscretePath::DiscretePath(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_((grid.steps() + 1) * dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("DiscretePath: dimension must be positive");
}

DiscretePath::DiscretePath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim == 0) throw std::invalid_argument("DiscretePath: dimension must be positive");
  if (values_.size() != (grid.steps() + 1) * dim)
    throw std::invalid_argument("DiscretePath: expected (N+1)*dim values");
}

std::span<const double> DiscretePath::at(std::size_t node) const {
  return std::span<const double>(values_).subspan(node * dim_, dim_);
}

std::span<double> DiscretePath::at(std::size_t node) {
  return std::span<double>(values_).subspan(node * dim_, dim_);
}

bool DiscretePath::origin_anchored() const {
  return std::all_of(values_.begin(), values_.begin() + static_cast<long>(dim_),
                     [](double v) { return v == 0.0; });
}

ControlPath::ControlPath(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), slopes_(grid.steps() * dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("ControlPath: dimension must be positive");
}

ControlPath::ControlPath(TimeGrid grid, std::size_t dim, std::vector<double> slopes)
    : grid_(grid), dim_(dim), slopes_(std::move(slopes)) {
  if (dim == 0) throw std::invalid_argument("ControlPath: dimension must be positive");
  if (slopes_.size() != grid.steps() * dim)
    throw std::invalid_argument("ControlPath: expected N*dim slopes");
  for (double s : slopes_)
    if (!std::isfinite(s)) throw std::invalid_argument("ControlPath: non-finite slope");
}

ControlPath ControlPath::constant(TimeGrid grid, std::span<const double> value) {
  ControlPath c(grid, value.size());
  for (std::size_t i = 0; i < grid.steps(); ++i)
    std::copy(value.begin(), value.end(), c.slope(i).begin());
  return c;
}

std::span<const double> ControlPath::slope(std::size_t step) const {
  return std::span<const double>(slopes_).subspan(step * dim_, dim_);
}

std::span<double> ControlPath::slope(std::size_t step) {
  return std::span<double>(slopes_).subspan(step * dim_, dim_);
}

double ControlPath::action() const {
  double s = 0.0;
  for (double a : slopes_) s += a * a;
  return 0.5 * s * grid_.dt();
}

double ControlPath::sup_norm() const {
  double m = 0.0;
  for (double a : slopes_) m = std::max(m, std::abs(a));
  return m;
}

PathPoint PathPoint::join(std::size_t node, const DiscretePath& omega,
                          const DiscretePath& x) {
  if (!(omega.grid() == x.grid()))
    throw std::invalid_argument("PathPoint::join: paths live on different grids");
  if (node > omega.grid().steps())
    throw std::invalid_argument("PathPoint::join: node past horizon");
  const std::size_t d = omega.dim();
  const std::size_t n = x.dim();
  DiscretePath joint(omega.grid(), d + n);
  for (std::size_t i = 0; i < joint.nodes(); ++i) {
    for (std::size_t c = 0; c < d; ++c) joint(i, c) = omega(i, c);
    for (std::size_t c = 0; c < n; ++c) joint(i, d + c) = x(i, c);
  }
  return PathPoint{node, std::move(joint)};
}

DiscretePath PathPoint::omega_part(std::size_t noise_dim) const {
  if (noise_dim == 0 || noise_dim >= path.dim())
    throw std::invalid_argument("PathPoint::omega_part: bad noise dimension");
  DiscretePath out(path.grid(), noise_dim);
  for (std::size_t i = 0; i < path.nodes(); ++i)
    for (std::size_t c = 0; c < noise_dim; ++c) out(i, c) = path(i, c);
  return out;
}

DiscretePath PathPoint::state_part(std::size_t noise_dim) const {
  if (noise_dim == 0 || noise_dim >= path.dim())
    throw std::invalid_argument("PathPoint::state_part: bad noise dimension");
  const std::size_t n = path.dim() - noise_dim;
  DiscretePath out(path.grid(), n);
  for (std::size_t i = 0; i < path.nodes(); ++i)
    for (std::size_t c = 0; c < n; ++c) out(i, c) = path(i, noise_dim + c);
  return out;
}

double sup_norm_to(const DiscretePath& p, double t) {
  const std::size_t last = p.grid().node_of(t);
  double m = 0.0;
  for (std::size_t i = 0; i <= last; ++i) m = std::max(m, norm(p.at(i)));
  return m;
}

DiscretePath concat(const DiscretePath& base, double t, const DiscretePath& tail) {
  const std::size_t split = base.grid().node_of(t);
  if (tail.dim() != base.dim())
    throw std::invalid_argument("concat: dimension mismatch");
  DiscretePath out = base;
  if (split == base.grid().steps()) return out;
  if (!tail.grid().compatible_with(base.grid().tail_from(split)))
    throw std::invalid_argument("concat: tail grid does not cover [0, T - t] with the same step");
  const auto anchor = base.at(split);
  for (std::size_t j = 1; j < tail.nodes(); ++j)
    for (std::size_t c = 0; c < base.dim(); ++c)
      out(split + j, c) = anchor[c] + tail(j, c);
  return out;
}

double pseudo_distance(const PathPoint& a, const PathPoint& b) {
  if (!(a.path.grid() == b.path.grid()) || a.path.dim() != b.path.dim())
    throw std::invalid_argument("pseudo_distance: points live on different grids");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.path.nodes(); ++i) {
    const auto va = a.path.at(std::min(i, a.node));
    const auto vb = b.path.at(std::min(i, b.node));
    sup = std::max(sup, distance(va, vb));
  }
  return std::abs(a.time() - b.time()) + sup;
}

double lipschitz_constant(const DiscretePath& p) { return lipschitz_constant_after(p, 0); }

double lipschitz_constant_after(const DiscretePath& p, std::size_t from) {
  double m = 0.0;
  for (std::size_t i = from; i < p.grid().steps(); ++i)
    m = std::max(m, distance(p.at(i + 1), p.at(i)));
  return m / p.grid().dt();
}

DiscretePath stopped_at(const DiscretePath& p, std::size_t node) {
  DiscretePath out = p;
  for (std::size_t i = node + 1; i < p.nodes(); ++i)
    for (std::size_t c = 0; c < p.dim(); ++c) out(i, c) = p(node, c);
  return out;
}

void write_csv(std::ostream& out, const DiscretePath& p) {
  out << "t";
  for (std::size_t c = 0; c < p.dim(); ++c) out << ",c" << c;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < p.nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.grid().time(i));
    out << buf;
    for (std::size_t c = 0; c < p.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", p(i, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

DiscretePath read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_csv: empty input");
  const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (dim == 0 || line.rfind("t,", 0) != 0)
    throw std::invalid_argument("read_csv: header must be t,c0,...");
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0)
        times.push_back(v);
      else
        values.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw std::invalid_argument("read_csv: ragged row");
  }
  if (times.size() < 2) throw std::invalid_argument("read_csv: need at least two nodes");
  TimeGrid grid(times.back(), times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - grid.time(i)) > 1e-9 * grid.dt())
      throw std::invalid_argument("read_csv: times are not a uniform grid from 0");
  return DiscretePath(grid, dim, std::move(values));
}

}  // namespace ldplab
