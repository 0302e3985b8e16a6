#include "ldplab/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ldplab/error.hpp"

namespace ldplab {

namespace {

const Json* find(const Json& cfg, const std::string& key) {
  const Json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (!node->is_object()) return nullptr;
    const auto it = node->find(part);
    if (it == node->end() || it->is_null()) return nullptr;
    node = &*it;
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

const Json& require(const Json& cfg, const std::string& key) {
  const Json* node = find(cfg, key);
  if (!node) throw ConfigError(key, "missing");
  return *node;
}

double as_double(const Json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kUnbounded;
    if (s == "-inf") return -kUnbounded;
  }
  throw ConfigError(key, "expected a number");
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

// Library constructors validate their arguments with invalid_argument;
// inside the registry those are config errors of the block.
template <class F>
auto build(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

using ModelFactory = std::function<std::shared_ptr<CoefficientModel>(const Json&, const std::string&)>;
using VolFactory = std::function<VolPtr(const Json&, const std::string&)>;
using PayoffFactory =
    std::function<std::shared_ptr<TerminalFunctional>(const Json&, const std::string&)>;
using DomainFactory = std::function<std::shared_ptr<Domain>(const Json&, const std::string&)>;

// Vol kinds double as scalar model kinds (ScalarVolModel with optional drift).
const std::map<std::string, VolFactory>& vol_registry() {
  static const std::map<std::string, VolFactory> r = {
      {"constant",
       [](const Json& p, const std::string&) { return constant_vol(get_double(p, "sigma")); }},
      {"local_vol",
       [](const Json& p, const std::string&) {
         return local_vol(get_double(p, "center"), get_double(p, "amplitude"));
       }},
      {"running_max_vol",
       [](const Json& p, const std::string&) {
         return running_max_vol(get_double(p, "center"), get_double(p, "amplitude"));
       }},
      {"delay_vol",
       [](const Json& p, const std::string&) {
         return delay_vol(get_double(p, "center"), get_double(p, "amplitude"),
                          get_double(p, "delay"));
       }},
      {"time_scaled_vol",
       [](const Json& p, const std::string&) {
         return time_scaled_vol(get_double(p, "base"), get_double(p, "slope"));
       }},
  };
  return r;
}

const std::map<std::string, ModelFactory>& model_registry() {
  static const std::map<std::string, ModelFactory> r = [] {
    std::map<std::string, ModelFactory> m;
    m["constant"] = [](const Json& p, const std::string&) -> std::shared_ptr<CoefficientModel> {
      const auto drift = get_doubles(p, "drift");
      const auto sigma = get_doubles(p, "sigma");
      const std::size_t d = get_size(p, "noise_dim", sigma.size() / drift.size());
      return std::make_shared<ConstantModel>(drift, sigma, d);
    };
    m["linear_drift"] = [](const Json& p, const std::string&) -> std::shared_ptr<CoefficientModel> {
      return std::make_shared<LinearDriftModel>(get_double(p, "kappa"), get_double(p, "mean"),
                                                get_double(p, "sigma"));
    };
    for (const auto& [name, vol] : vol_registry()) {
      if (name == "constant") continue;
      m[name] = [vol](const Json& p, const std::string& k) -> std::shared_ptr<CoefficientModel> {
        return std::make_shared<ScalarVolModel>(vol(p, k), get_double(p, "drift", 0.0));
      };
    }
    m["log_price"] = [](const Json& p, const std::string&) -> std::shared_ptr<CoefficientModel> {
      return std::make_shared<LogPriceModel>(make_vol(p, "vol"));
    };
    return m;
  }();
  return r;
}

const std::map<std::string, PayoffFactory>& payoff_registry() {
  static const std::map<std::string, PayoffFactory> r = {
      {"constant",
       [](const Json& p, const std::string&) -> std::shared_ptr<TerminalFunctional> {
         return std::make_shared<ConstantPayoff>(get_double(p, "value"));
       }},
      {"clipped_linear",
       [](const Json& p, const std::string&) -> std::shared_ptr<TerminalFunctional> {
         return std::make_shared<ClippedLinear>(get_doubles(p, "weights"), get_double(p, "cap"));
       }},
      {"running_max",
       [](const Json& p, const std::string&) -> std::shared_ptr<TerminalFunctional> {
         return std::make_shared<RunningMaxPayoff>(get_double(p, "lambda"), get_double(p, "cap"));
       }},
      {"clipped_call",
       [](const Json& p, const std::string&) -> std::shared_ptr<TerminalFunctional> {
         std::optional<double> cap;
         if (has_key(p, "cap")) cap = get_double(p, "cap");
         return std::make_shared<ClippedCall>(get_double(p, "k"), cap);
       }},
  };
  return r;
}

const std::map<std::string, DomainFactory>& domain_registry() {
  static const std::map<std::string, DomainFactory> r = {
      {"interval",
       [](const Json& p, const std::string&) -> std::shared_ptr<Domain> {
         return std::make_shared<Interval>(get_double(p, "lower"), get_double(p, "upper"));
       }},
      {"ball",
       [](const Json& p, const std::string&) -> std::shared_ptr<Domain> {
         return std::make_shared<Ball>(get_doubles(p, "center"), get_double(p, "radius"));
       }},
      {"box",
       [](const Json& p, const std::string&) -> std::shared_ptr<Domain> {
         return std::make_shared<Box>(get_doubles(p, "lower"), get_doubles(p, "upper"));
       }},
  };
  return r;
}

template <class Map>
std::vector<std::string> names(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [name, f] : m) out.push_back(name);
  return out;
}

// Looks up block.kind in the registry and calls the factory on block.params.
// Errors raised while reading params are re-keyed under the block.
template <class Map>
auto instantiate(const Map& registry, const Json& cfg, const std::string& key,
                 const char* what) {
  const Json& block = require(cfg, key);
  const std::string kind = get_string(cfg, key + ".kind");
  const auto it = registry.find(kind);
  if (it == registry.end())
    throw ConfigError(key + ".kind",
                      "unknown " + std::string(what) + " kind '" + kind + "' (known: " +
                          join(names(registry)) + ")");
  static const Json empty = Json::object();
  const Json* params = find(block, "params");
  try {
    return build(key, [&] { return it->second(params ? *params : empty, key + ".params"); });
  } catch (const ConfigError& e) {
    if (e.key().rfind(key, 0) == 0) throw;
    throw ConfigError(key + ".params." + e.key(), std::string(e.what()).substr(e.key().size() + 2));
  }
}

}  // namespace

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

std::string config_hash(const Json& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : cfg.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool has_key(const Json& cfg, const std::string& key) { return find(cfg, key) != nullptr; }

double get_double(const Json& cfg, const std::string& key) {
  return as_double(require(cfg, key), key);
}

double get_double(const Json& cfg, const std::string& key, double fallback) {
  const Json* v = find(cfg, key);
  return v ? as_double(*v, key) : fallback;
}

std::size_t get_size(const Json& cfg, const std::string& key, std::size_t fallback) {
  const Json* v = find(cfg, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
    throw ConfigError(key, "expected a non-negative integer");
  return v->get<std::size_t>();
}

std::uint64_t get_u64(const Json& cfg, const std::string& key) {
  const Json& v = require(cfg, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& cfg, const std::string& key, bool fallback) {
  const Json* v = find(cfg, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(key, "expected true or false");
  return v->get<bool>();
}

std::string get_string(const Json& cfg, const std::string& key) {
  const Json& v = require(cfg, key);
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const Json& cfg, const std::string& key) {
  const Json& v = require(cfg, key);
  if (!v.is_array()) return {as_double(v, key)};
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_double(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> get_doubles(const Json& cfg, const std::string& key,
                                std::vector<double> fallback) {
  return has_key(cfg, key) ? get_doubles(cfg, key) : fallback;
}

std::vector<double> get_schedule(const Json& cfg, const std::string& key) {
  auto s = get_doubles(cfg, key);
  if (s.empty()) throw ConfigError(key, "empty schedule");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 0.0) || (i > 0 && !(s[i] < s[i - 1])))
      throw ConfigError(key, "schedule must be positive and strictly decreasing");
  return s;
}

std::shared_ptr<CoefficientModel> make_model(const Json& cfg, const std::string& key) {
  return instantiate(model_registry(), cfg, key, "model");
}

VolPtr make_vol(const Json& cfg, const std::string& key) {
  return instantiate(vol_registry(), cfg, key, "vol");
}

std::shared_ptr<TerminalFunctional> make_payoff(const Json& cfg, const std::string& key) {
  return instantiate(payoff_registry(), cfg, key, "payoff");
}

std::shared_ptr<Domain> make_domain(const Json& cfg, const std::string& key) {
  return instantiate(domain_registry(), cfg, key, "domain");
}

std::vector<std::string> model_kinds() { return names(model_registry()); }
std::vector<std::string> vol_kinds() { return names(vol_registry()); }
std::vector<std::string> payoff_kinds() { return names(payoff_registry()); }
std::vector<std::string> domain_kinds() { return names(domain_registry()); }

VolPtr vol_of_model(const Json& cfg, const std::string& key) {
  const std::string kind = get_string(cfg, key + ".kind");
  if (kind == "log_price") return make_vol(cfg, key + ".params.vol");
  if (kind == "constant") {
    const auto sigma = get_doubles(cfg, key + ".params.sigma");
    if (sigma.size() != 1) throw ConfigError(key + ".params.sigma", "expected a scalar");
    return constant_vol(sigma[0]);
  }
  if (vol_registry().count(kind)) return make_vol(cfg, key);
  throw ConfigError(key + ".kind", "'" + kind + "' has no scalar volatility");
}

TimeGrid make_grid(const Json& cfg) {
  const double T = get_double(cfg, "grid.T", 1.0);
  const std::size_t N = get_size(cfg, "grid.N", 128);
  return build("grid", [&] { return TimeGrid(T, N); });
}

std::vector<double> make_x0(const Json& cfg, std::size_t state_dim) {
  auto x0 = get_doubles(cfg, "x0", std::vector<double>(state_dim, 0.0));
  if (x0.size() == 1 && state_dim > 1) x0.assign(state_dim, x0[0]);
  if (x0.size() != state_dim)
    throw ConfigError("x0", "expected " + std::to_string(state_dim) + " entries");
  return x0;
}

rate::OptimizerOptions make_optimizer(const Json& cfg, std::uint64_t seed, std::size_t threads) {
  rate::OptimizerOptions o;
  o.restarts = get_size(cfg, "optimizer.restarts", o.restarts);
  o.max_iter = get_size(cfg, "optimizer.max_iter", o.max_iter);
  o.tol = get_double(cfg, "optimizer.tol", o.tol);
  if (has_key(cfg, "optimizer.clamp")) o.clamp = get_double(cfg, "optimizer.clamp");
  o.seed = has_key(cfg, "optimizer.seed") ? get_u64(cfg, "optimizer.seed") : seed;
  if (has_key(cfg, "optimizer.gradient")) {
    const auto g = get_string(cfg, "optimizer.gradient");
    if (g == "automatic") o.scheme = flow::GradientScheme::automatic;
    else if (g == "central_fd") o.scheme = flow::GradientScheme::central_fd;
    else if (g == "forward_sensitivity") o.scheme = flow::GradientScheme::forward_sensitivity;
    else throw ConfigError("optimizer.gradient", "unknown scheme '" + g + "'");
  }
  if (o.restarts == 0) throw ConfigError("optimizer.restarts", "must be >= 1");
  if (!(o.tol > 0.0)) throw ConfigError("optimizer.tol", "must be positive");
  o.threads = threads;
  return o;
}

rate::ExitOptions make_exit_options(const Json& cfg, std::uint64_t seed, std::size_t threads) {
  rate::ExitOptions e;
  if (has_key(cfg, "exit.levels")) {
    e.schedule.levels = get_doubles(cfg, "exit.levels");
    const auto& l = e.schedule.levels;
    for (std::size_t i = 0; i < l.size(); ++i)
      if (!(l[i] > 0.0) || (i > 0 && !(l[i] > l[i - 1])))
        throw ConfigError("exit.levels", "levels must be positive and strictly increasing");
  } else {
    e.schedule = rate::PenaltySchedule::geometric(get_double(cfg, "exit.m0", 1.0),
                                                  get_size(cfg, "exit.count", 12));
  }
  e.stride = get_size(cfg, "exit.stride", e.stride);
  if (e.stride == 0) throw ConfigError("exit.stride", "must be >= 1");
  e.eta = get_double(cfg, "exit.eta", e.eta);
  e.optimizer = make_optimizer(cfg, seed, threads);
  return e;
}

mc::McConfig make_mc(const Json& cfg, const TimeGrid& grid, std::uint64_t seed,
                     std::size_t threads) {
  mc::McConfig c;
  c.n_paths = get_size(cfg, "mc.n_paths", c.n_paths);
  if (c.n_paths < 2) throw ConfigError("mc.n_paths", "need at least 2 paths");
  c.grid = grid;
  c.seed = has_key(cfg, "mc.seed") ? get_u64(cfg, "mc.seed") : seed;
  c.antithetic = get_bool(cfg, "mc.antithetic", false);
  c.threads = threads;
  return c;
}

void check_top_level(const Json& cfg) {
  static const std::set<std::string> known = {
      "experiment", "description", "seed", "model", "payoff", "domain", "x0", "grid",
      "optimizer",  "exit",        "mc",   "eikonal", "smile", "flow",  "plot"};
  if (!cfg.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [k, v] : cfg.items())
    if (!known.count(k)) throw ConfigError(k, "unknown top-level key");
}

}  // namespace ldplab
