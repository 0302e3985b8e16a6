#include "ldplab/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

#include "ldplab/eikonal.hpp"
#include "ldplab/error.hpp"
#include "ldplab/flow.hpp"
#include "ldplab/montecarlo.hpp"
#include "ldplab/plot.hpp"
#include "ldplab/rate.hpp"
#include "ldplab/smile.hpp"

namespace ldplab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::vector<std::string> indexed(const std::string& name, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(name + "_" + std::to_string(i));
  return out;
}

template <class... V>
std::vector<std::string> cat(V&&... parts) {
  std::vector<std::string> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

struct Context {
  const Json& cfg;
  std::uint64_t seed;
  std::size_t threads;
  bool plot;
};

struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  Json results = Json::object();
  std::vector<std::string> warnings;
  std::string status = "ok";
  int exit_code = 0;

  void add(const std::string& name, std::string content) {
    files.emplace_back(name, std::move(content));
  }
  void plot(const std::string& csv_name, const std::string& svg_name) {
    for (const auto& [name, content] : files) {
      if (name != csv_name) continue;
      std::istringstream in(content);
      add(svg_name, render_svg(read_table(in), csv_name));
      return;
    }
  }
};

std::string control_csv(const ControlPath& a) {
  Csv csv(cat(std::vector<std::string>{"t"}, indexed("alpha", a.dim())));
  for (std::size_t i = 0; i < a.steps(); ++i) {
    std::vector<double> row{a.grid().time(i)};
    for (const double v : a.slope(i)) row.push_back(v);
    csv.row(row);
  }
  return csv.str();
}

std::string trajectory_csv(const flow::ControlledFlowResult& r) {
  Csv csv(cat(std::vector<std::string>{"t"}, indexed("omega", r.omega.dim()),
              indexed("x", r.x.dim())));
  for (std::size_t i = 0; i < r.x.nodes(); ++i) {
    std::vector<double> row{r.x.grid().time(i)};
    for (const double v : r.omega.at(i)) row.push_back(v);
    for (const double v : r.x.at(i)) row.push_back(v);
    csv.row(row);
  }
  return csv.str();
}

const std::vector<std::string> kConvergenceHeader = {"eps",   "estimate", "stderr", "ci_lo",
                                                     "ci_hi", "limit",    "abs_gap"};

std::vector<double> convergence_values(const mc::ConvergenceRow& r) {
  return {r.eps, r.estimate, r.std_error, r.ci_lo, r.ci_hi, r.limit, r.abs_gap};
}

Json armijo_json(const rate::OptimizerOptions& o) {
  return {{"initial_step", 1.0}, {"shrink", 0.5}, {"slope_factor", 1e-4}, {"tol", o.tol},
          {"max_iter", o.max_iter}, {"restarts", o.restarts}};
}

void check_rate_convergence(const rate::RateResult& r, Output& o) {
  if (r.converged) return;
  if (r.stalled) {
    o.warnings.push_back("line search stalled before the gradient tolerance was met");
    return;
  }
  o.warnings.push_back("optimizer hit max_iter");
  o.status = "not_converged";
  o.exit_code = 3;
}

void rate_laplace(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto xi = make_payoff(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const auto opt = make_optimizer(c.cfg, c.seed, c.threads);
  const auto r = rate::minimize_laplace(*model, *xi, x0, grid, opt);
  const auto traj = flow::integrate(*model, x0, r.control);
  o.results = {{"value", r.value},
               {"action", r.control.action()},
               {"grad_norm", r.grad_norm},
               {"iterations", r.iterations},
               {"restarts_used", r.restarts_used},
               {"converged", r.converged},
               {"stalled", r.stalled},
               {"control_sup", r.control.sup_norm()},
               {"armijo", armijo_json(opt)}};
  check_rate_convergence(r, o);
  o.add("control.csv", control_csv(r.control));
  o.add("trajectory.csv", trajectory_csv(traj));
}

void rate_exit(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto domain = make_domain(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const auto opts = make_exit_options(c.cfg, c.seed, c.threads);
  const auto r = rate::exit_rate(*model, *domain, x0, grid, opts);
  Csv levels({"m", "y_m", "horizon"});
  for (const auto& row : r.levels) levels.row({row.level, row.value, row.horizon});
  o.results = {{"value", r.rate.value},
               {"best_horizon", r.best_horizon},
               {"refined", r.refined},
               {"grad_norm", r.rate.grad_norm},
               {"iterations", r.rate.iterations},
               {"converged", r.rate.converged},
               {"penalty_levels", opts.schedule.levels},
               {"stride", opts.stride},
               {"armijo", armijo_json(opts.optimizer)}};
  o.warnings.insert(o.warnings.end(), r.warnings.begin(), r.warnings.end());
  if (!r.rate.converged) {
    o.status = "not_converged";
    o.exit_code = 3;
  }
  o.add("control.csv", control_csv(r.rate.control));
  o.add("levels.csv", levels.str());
  if (r.rate.control.steps() > 0)
    o.add("trajectory.csv", trajectory_csv(flow::integrate(*model, x0, r.rate.control)));
  if (c.plot) o.plot("levels.csv", "levels.svg");
}

void finish_convergence(const std::vector<mc::ConvergenceRow>& rows, Output& o, bool plot) {
  Csv csv(kConvergenceHeader);
  for (const auto& r : rows) csv.row(convergence_values(r));
  o.add("convergence.csv", csv.str());
  if (plot) o.plot("convergence.csv", "convergence.svg");
}

void mc_laplace(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto xi = make_payoff(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const auto eps = get_schedule(c.cfg, "mc.eps_schedule");
  auto mcc = make_mc(c.cfg, grid, c.seed, c.threads);
  const bool is = get_bool(c.cfg, "mc.importance_sampling", false);

  double limit = 0.0;
  std::string source = "config";
  if (has_key(c.cfg, "mc.limit")) limit = get_double(c.cfg, "mc.limit");
  if (is || !has_key(c.cfg, "mc.limit")) {
    const auto r = rate::minimize_laplace(*model, *xi, x0, grid,
                                          make_optimizer(c.cfg, c.seed, c.threads));
    check_rate_convergence(r, o);
    if (!has_key(c.cfg, "mc.limit")) limit = r.value, source = "rate";
    if (is) mcc.is_control = r.control;
  }

  Json per_eps = Json::array();
  const auto rows = mc::convergence_study(eps, limit, [&](double e) {
    mcc.epsilon = e;
    Json entry = {{"eps", e}};
    mc::McEstimate est;
    if (is) {
      const auto r = mc::laplace_is(*model, *xi, x0, mcc);
      est = r.estimate;
      entry["upper_bound"] = r.upper_bound;
      entry["upper_bound_se"] = r.upper_bound_se;
      if (est.log_weights) entry["log_weight_mean"] = est.log_weights->first;
    } else {
      est = mc::laplace_naive(*model, *xi, x0, mcc);
    }
    entry["log_integrand_variance"] = est.log_integrand_variance;
    entry["n_effective"] = est.n_effective;
    for (const auto& w : est.warnings) o.warnings.push_back("eps " + fmt(e) + ": " + w);
    per_eps.push_back(entry);
    return est;
  });
  o.results = {{"limit", limit},
               {"limit_source", source},
               {"importance_sampling", is},
               {"n_paths", mcc.n_paths},
               {"per_eps", per_eps}};
  finish_convergence(rows, o, c.plot);
}

void mc_exit(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto domain = make_domain(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const auto eps = get_schedule(c.cfg, "mc.eps_schedule");
  auto mcc = make_mc(c.cfg, grid, c.seed, c.threads);
  const bool bridge = get_bool(c.cfg, "mc.bridge", false);

  double limit = 0.0;
  std::string source = "config";
  if (has_key(c.cfg, "mc.limit")) {
    limit = get_double(c.cfg, "mc.limit");
  } else {
    const auto r = rate::exit_rate(*model, *domain, x0, grid,
                                   make_exit_options(c.cfg, c.seed, c.threads));
    o.warnings.insert(o.warnings.end(), r.warnings.begin(), r.warnings.end());
    limit = r.rate.value;
    source = "rate";
  }

  Json per_eps = Json::array();
  bool bridge_used = false;
  const auto rows = mc::convergence_study(eps, limit, [&](double e) {
    mcc.epsilon = e;
    const auto r = mc::exit_prob(*model, *domain, x0, mcc, bridge);
    bridge_used = r.bridge_used;
    per_eps.push_back({{"eps", e},
                       {"probability", r.probability.value},
                       {"probability_stderr", r.probability.std_error},
                       {"probability_ci", {r.probability.ci_lo, r.probability.ci_hi}}});
    for (const auto& w : r.rate.warnings) o.warnings.push_back("eps " + fmt(e) + ": " + w);
    return r.rate;
  });
  if (bridge && !bridge_used)
    o.warnings.push_back("bridge correction requested but needs constant scalar sigma on an interval");
  o.results = {{"limit", limit},   {"limit_source", source}, {"bridge_used", bridge_used},
               {"n_paths", mcc.n_paths}, {"per_eps", per_eps}};
  finish_convergence(rows, o, c.plot);
}

void convergence(const Context& c, Output& o) {
  const Context plotted{c.cfg, c.seed, c.threads, true};
  if (has_key(c.cfg, "domain")) mc_exit(plotted, o);
  else mc_laplace(plotted, o);
}

// Reads entry `key` of a points array, re-keying errors under `prefix`.
template <class F>
auto keyed(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.key(), std::string(e.what()).substr(e.key().size() + 2));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(prefix.substr(0, prefix.size() - 1), e.what());
  }
}

void eikonal_check(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto xi = make_payoff(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const auto opt = make_optimizer(c.cfg, c.seed, c.threads);
  const std::size_t h_steps = get_size(c.cfg, "eikonal.h_steps", 2);
  if (h_steps == 0) throw ConfigError("eikonal.h_steps", "must be >= 1");
  const auto K_grid = get_doubles(c.cfg, "eikonal.K_grid", eikonal::default_K_grid());
  const bool refine = get_bool(c.cfg, "eikonal.refine", true);
  if (!has_key(c.cfg, "eikonal.points") || !c.cfg["eikonal"]["points"].is_array())
    throw ConfigError("eikonal.points", "expected an array of points");
  const Json& points = c.cfg["eikonal"]["points"];

  const std::size_t d = model->noise_dim(), n = model->state_dim();
  const auto slopes = eikonal::default_probe_slopes(d + n);
  Csv csv(cat(std::vector<std::string>{"t", "u", "du_dt"}, indexed("du_domega", d),
              indexed("du_dx", n), std::vector<std::string>{"residual", "misfit", "K0", "K"}));
  Json per_point = Json::array();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::string prefix = "eikonal.points[" + std::to_string(p) + "].";
    const Json& pt = points[p];
    const auto [node, w_slope, x_slope] = keyed(prefix, [&] {
      const auto node = grid.node_of(get_double(pt, "t"));
      const auto w = get_doubles(pt, "omega_slope", std::vector<double>(d, 0.0));
      const auto x = get_doubles(pt, "x_slope", std::vector<double>(n, 0.0));
      if (w.size() != d) throw ConfigError("omega_slope", "expected " + std::to_string(d) + " entries");
      if (x.size() != n) throw ConfigError("x_slope", "expected " + std::to_string(n) + " entries");
      return std::tuple{node, w, x};
    });
    DiscretePath omega(grid, d), x(grid, n);
    for (std::size_t i = 0; i < omega.nodes(); ++i) {
      const double t = grid.time(i);
      for (std::size_t j = 0; j < d; ++j) omega(i, j) = w_slope[j] * t;
      for (std::size_t j = 0; j < n; ++j) x(i, j) = x0[j] + x_slope[j] * t;
    }
    const auto theta = PathPoint::join(node, omega, x);
    const auto probe = keyed(prefix, [&] {
      return eikonal::viscosity_residual(*model, *xi, theta, h_steps, slopes, K_grid, opt);
    });
    std::vector<double> row{probe.t, probe.u, probe.du_dt};
    row.insert(row.end(), probe.du_domega.begin(), probe.du_domega.end());
    row.insert(row.end(), probe.du_dx.begin(), probe.du_dx.end());
    row.insert(row.end(), {probe.residual, probe.misfit, probe.K0, probe.K});
    csv.row(row);
    Json entry = {{"t", probe.t},          {"u", probe.u},   {"residual", probe.residual},
                  {"misfit", probe.misfit}, {"K0", probe.K0}, {"K", probe.K},
                  {"h_steps", h_steps}};
    if (refine && h_steps % 2 == 0) {
      const auto half = keyed(prefix, [&] {
        return eikonal::viscosity_residual(*model, *xi, theta, h_steps / 2, slopes, K_grid, opt);
      });
      entry["residual_half"] = half.residual;
    }
    if (has_key(c.cfg, "eikonal.dp_levels")) {
      const auto spec = get_doubles(c.cfg, "eikonal.dp_levels");
      if (spec.size() != 3 || !(spec[2] >= 1.0))
        throw ConfigError("eikonal.dp_levels", "expected [lo, hi, count]");
      const std::size_t s_node = node + get_size(c.cfg, "eikonal.dp_steps", 2);
      const auto levels =
          eikonal::control_levels(spec[0], spec[1], static_cast<std::size_t>(spec[2]));
      entry["dp_residual"] = keyed(prefix, [&] {
        return eikonal::dp_residual(*model, *xi, theta, s_node, levels, opt);
      });
    }
    if (get_bool(c.cfg, "eikonal.time_increment", false)) {
      const auto ti = keyed(prefix, [&] {
        return eikonal::time_increment(*model, *xi, theta, h_steps, opt);
      });
      entry["time_increment"] = {{"u_t", ti.u_t}, {"u_t_plus_h", ti.u_t_plus_h}, {"bound", ti.bound}};
    }
    per_point.push_back(entry);
  }
  o.results = {{"points", per_point}, {"K_grid", K_grid}};
  o.add("eikonal.csv", csv.str());
}

void smile_experiment(const Context& c, Output& o) {
  const auto vol = vol_of_model(c.cfg);
  const auto ks = get_doubles(c.cfg, "smile.k");
  for (const double k : ks)
    if (!(k > 0.0)) throw ConfigError("smile.k", "strikes must be positive log-moneyness");
  const auto a_schedule =
      get_doubles(c.cfg, "smile.a_schedule", {-0.25, -0.5, -1.0, -2.0, -4.0, -8.0});
  for (std::size_t i = 0; i < a_schedule.size(); ++i)
    if (!(a_schedule[i] < 0.0) || (i > 0 && !(a_schedule[i] < a_schedule[i - 1])))
      throw ConfigError("smile.a_schedule", "must be negative and strictly decreasing");

  smile::SmileOptions so;
  so.grid = make_grid(c.cfg);
  if (so.grid.horizon() != 1.0) throw ConfigError("grid.T", "the smile correspondence needs T = 1");
  const std::size_t stride = so.exit.stride;
  so.exit = make_exit_options(c.cfg, c.seed, c.threads);
  if (!has_key(c.cfg, "exit.stride")) so.exit.stride = stride;
  so.stabilization = get_double(c.cfg, "smile.stabilization", so.stabilization);

  Csv table({"k", "Q0", "Sigma0_sq", "a_used"});
  Json strikes = Json::array();
  std::vector<double> q0s;
  for (const double k : ks) {
    const auto s = smile::q0_of_strike(vol, k, a_schedule, so);
    table.row({s.k, s.Q0, s.Sigma0_sq, s.a_used});
    q0s.push_back(s.Q0);
    Json trace = Json::array();
    for (const auto& [a, q] : s.trace) trace.push_back({a, q});
    strikes.push_back({{"k", k}, {"Q0", s.Q0}, {"Sigma0_sq", s.Sigma0_sq}, {"a_used", s.a_used},
                       {"trace", trace}});
  }
  o.add("smile.csv", table.str());
  o.results = {{"strikes", strikes}, {"vol", vol->kind()}};

  if (!has_key(c.cfg, "smile.eps_schedule")) return;
  const auto eps = get_schedule(c.cfg, "smile.eps_schedule");
  const auto mcc = make_mc(c.cfg, so.grid, c.seed, c.threads);
  Csv gaps(cat(std::vector<std::string>{"k"}, kConvergenceHeader));
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (const auto& r : smile::mc_call_rate(vol, ks[i], eps, mcc, q0s[i])) {
      auto row = convergence_values(r);
      row.insert(row.begin(), ks[i]);
      gaps.row(row);
    }
  o.add("call_rate.csv", gaps.str());
  o.results["n_paths"] = mcc.n_paths;
  if (c.plot) o.plot("call_rate.csv", "call_rate.svg");
}

void flow_dump(const Context& c, Output& o) {
  const auto model = make_model(c.cfg);
  const auto grid = make_grid(c.cfg);
  const auto x0 = make_x0(c.cfg, model->state_dim());
  const std::size_t d = model->noise_dim();
  ControlPath alpha(grid, d);
  if (has_key(c.cfg, "flow.control.slopes")) {
    const auto s = get_doubles(c.cfg, "flow.control.slopes");
    if (s.size() != grid.steps() * d)
      throw ConfigError("flow.control.slopes", "expected N * d = " +
                                                   std::to_string(grid.steps() * d) + " entries");
    alpha = ControlPath(grid, d, s);
  } else if (has_key(c.cfg, "flow.control.constant")) {
    const auto v = get_doubles(c.cfg, "flow.control.constant");
    if (v.size() != d)
      throw ConfigError("flow.control.constant", "expected " + std::to_string(d) + " entries");
    alpha = ControlPath::constant(grid, v);
  } else {
    throw ConfigError("flow.control", "need 'constant' or 'slopes'");
  }
  const auto r = flow::integrate(*model, x0, alpha);
  std::vector<double> xT(r.x.at(r.x.nodes() - 1).begin(), r.x.at(r.x.nodes() - 1).end());
  o.results = {{"action", r.action}, {"x_T", xT}};
  o.add("control.csv", control_csv(alpha));
  o.add("trajectory.csv", trajectory_csv(r));
}

struct Experiment {
  std::function<void(const Context&, Output&)> run;
  bool stochastic;
  const char* advisory;
};

const std::map<std::string, Experiment>& registry() {
  static const std::map<std::string, Experiment> r = {
      {"rate-laplace", {rate_laplace, false, "raise optimizer.max_iter or loosen optimizer.tol"}},
      {"rate-exit", {rate_exit, false, "raise optimizer.max_iter or use a coarser exit.stride"}},
      {"mc-laplace",
       {mc_laplace, true,
        "the naive estimator underflows for small epsilon; set mc.importance_sampling to true "
        "or raise the smallest epsilon"}},
      {"mc-exit", {mc_exit, true, "no path exited; raise the smallest epsilon or mc.n_paths"}},
      {"convergence",
       {convergence, true,
        "set mc.importance_sampling to true, or raise the smallest epsilon or mc.n_paths"}},
      {"eikonal-check", {eikonal_check, false, "widen eikonal.K_grid"}},
      {"smile",
       {smile_experiment, false,
        "extend smile.a_schedule, or raise the smallest epsilon in smile.eps_schedule"}},
      {"flow-dump", {flow_dump, false, "reduce the control magnitude or refine grid.N"}},
  };
  return r;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write " + path.string());
  out << content;
}

}  // namespace

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& [k, e] : registry()) out.push_back(k);
  return out;
}

Json effective_config(Json cfg, const RunOptions& opts) {
  if (!cfg.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  if (opts.experiment) cfg["experiment"] = *opts.experiment;
  if (opts.seed) {
    cfg["seed"] = *opts.seed;
    for (const char* block : {"mc", "optimizer"})
      if (cfg.contains(block) && cfg[block].is_object() && cfg[block].contains("seed"))
        cfg[block]["seed"] = *opts.seed;
  }
  return cfg;
}

RunOutcome run_experiment(const Json& raw, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const Json cfg = effective_config(raw, opts);
  check_top_level(cfg);
  const std::string kind = get_string(cfg, "experiment");
  const auto it = registry().find(kind);
  if (it == registry().end()) {
    std::string known;
    for (const auto& k : experiment_kinds()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("experiment", "unknown experiment '" + kind + "' (known: " + known + ")");
  }
  const Experiment& exp = it->second;
  const bool stochastic =
      exp.stochastic || (kind == "smile" && has_key(cfg, "smile.eps_schedule"));
  if (stochastic && !has_key(cfg, "seed") && !has_key(cfg, "mc.seed"))
    throw ConfigError("seed", "required for stochastic experiments");
  const std::uint64_t seed = has_key(cfg, "seed") ? get_u64(cfg, "seed") : 0;
  if (opts.threads == 0) throw ConfigError("threads", "must be >= 1");

  Output out;
  const Context ctx{cfg, seed, opts.threads, get_bool(cfg, "plot", false)};
  Json failure;
  try {
    exp.run(ctx, out);
  } catch (const NumericalError& e) {
    out.files.clear();
    out.status = "numerical_failure";
    out.exit_code = 3;
    failure = {{"error", e.what()}, {"advisory", exp.advisory}};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(kind, e.what());
  }

  RunOutcome outcome;
  outcome.exit_code = out.exit_code;
  Json files = Json::array();
  for (const auto& [name, content] : out.files) files.push_back(name);
  outcome.manifest = {{"artifact", "ldplab"},
                      {"version", kVersion},
                      {"experiment", kind},
                      {"config_hash", config_hash(cfg)},
                      {"seed", has_key(cfg, "mc.seed") ? get_u64(cfg, "mc.seed") : seed},
                      {"status", out.status},
                      {"results", out.results},
                      {"warnings", out.warnings},
                      {"outputs", files},
                      {"config", cfg}};
  if (!failure.is_null()) outcome.manifest.update(failure);

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw ConfigError("out", "cannot create " + opts.out_dir.string() + ": " + ec.message());
  for (const auto& [name, content] : out.files) {
    write_file(opts.out_dir / name, content);
    outcome.files.push_back(name);
  }
  write_file(opts.out_dir / "manifest.json", outcome.manifest.dump(2) + "\n");
  outcome.files.push_back("manifest.json");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file(opts.out_dir / "timing.json",
             Json{{"seconds", seconds}, {"threads", opts.threads}}.dump(2) + "\n");
  outcome.files.push_back("timing.json");
  return outcome;
}

}  // namespace ldplab
