#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ldplab {

/// Uniform partition of [0, T] into N steps.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

  /// Node time i*dt; the last node is the horizon itself.
  double time(std::size_t node) const;

  /// Index of the node at time t. Throws std::invalid_argument if t is not
  /// a node (relative tolerance 1e-9 of dt).
  std::size_t node_of(double t) const;

  /// Grid covering [0, T - t_node] with the same step, used for the
  /// continuation of a path after `node`.
  TimeGrid tail_from(std::size_t node) const;

  /// Grid covering [0, t_node] with the same step.
  TimeGrid head_to(std::size_t node) const;

  /// Same number of steps and same dt up to rounding.
  bool compatible_with(const TimeGrid& other) const noexcept;

  bool operator==(const TimeGrid& other) const noexcept = default;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

/// Path sampled at the N+1 nodes of a grid, stored node-major.
class DiscretePath {
 public:
  DiscretePath(TimeGrid grid, std::size_t dim);
  DiscretePath(TimeGrid grid, std::size_t dim, std::vector<double> values);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t nodes() const noexcept { return grid_.steps() + 1; }

  std::span<const double> at(std::size_t node) const;
  std::span<double> at(std::size_t node);
  double operator()(std::size_t node, std::size_t component) const {
    return values_[node * dim_ + component];
  }
  double& operator()(std::size_t node, std::size_t component) {
    return values_[node * dim_ + component];
  }
  std::span<const double> values() const noexcept { return values_; }

  /// True when the value at node 0 is the origin.
  bool origin_anchored() const;

  bool operator==(const DiscretePath& other) const = default;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Piecewise-constant control: slope i holds on [t_i, t_{i+1}).
class ControlPath {
 public:
  ControlPath(TimeGrid grid, std::size_t dim);
  ControlPath(TimeGrid grid, std::size_t dim, std::vector<double> slopes);
  static ControlPath constant(TimeGrid grid, std::span<const double> value);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t steps() const noexcept { return grid_.steps(); }

  std::span<const double> slope(std::size_t step) const;
  std::span<double> slope(std::size_t step);
  std::span<const double> slopes() const noexcept { return slopes_; }
  std::span<double> slopes() noexcept { return slopes_; }

  /// 1/2 * sum |slope_i|^2 * dt.
  double action() const;
  /// Largest absolute slope component.
  double sup_norm() const;

  bool operator==(const ControlPath& other) const = default;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> slopes_;
};

/// A point (t, omega_hat) of the path space: a node index and a joint
/// path of dimension d + n whose values after the node are ignored.
struct PathPoint {
  std::size_t node;
  DiscretePath path;

  double time() const { return path.grid().time(node); }

  /// Joins a noise path and a state path on the same grid.
  static PathPoint join(std::size_t node, const DiscretePath& omega,
                        const DiscretePath& x);
  /// First `noise_dim` components.
  DiscretePath omega_part(std::size_t noise_dim) const;
  /// Remaining components.
  DiscretePath state_part(std::size_t noise_dim) const;
};

double sup_norm_to(const DiscretePath& p, double t);

/// (base (x)_t tail)_s = base_s for s <= t, base_t + tail_{s-t} after.
DiscretePath concat(const DiscretePath& base, double t, const DiscretePath& tail);

/// |t - t'| + sup_s |p_{t ^ s} - p'_{t' ^ s}|.
double pseudo_distance(const PathPoint& a, const PathPoint& b);

/// max_i |p(t_{i+1}) - p(t_i)| / dt.
double lipschitz_constant(const DiscretePath& p);
/// Same, restricted to increments starting at or after node `from`.
double lipschitz_constant_after(const DiscretePath& p, std::size_t from);

/// Path stopped at `node`: values after it are replaced by the value there.
DiscretePath stopped_at(const DiscretePath& p, std::size_t node);

void write_csv(std::ostream& out, const DiscretePath& p);
DiscretePath read_csv(std::istream& in);

}  // namespace ldplab
