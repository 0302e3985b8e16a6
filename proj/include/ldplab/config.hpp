#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldplab/models.hpp"
#include "ldplab/montecarlo.hpp"
#include "ldplab/paths.hpp"
#include "ldplab/rate.hpp"

namespace ldplab {

using Json = nlohmann::json;

/// Parses a JSON config file. Syntax errors become ConfigError with the
/// file name as key.
Json load_config(const std::string& path);

/// FNV-1a 64 of the compact dump, as 16 lowercase hex digits.
std::string config_hash(const Json& cfg);

// Typed lookups by dotted key ("mc.n_paths"). Missing entries without a
// fallback and entries of the wrong type throw ConfigError naming the key.
bool has_key(const Json& cfg, const std::string& key);
double get_double(const Json& cfg, const std::string& key);
double get_double(const Json& cfg, const std::string& key, double fallback);
std::size_t get_size(const Json& cfg, const std::string& key, std::size_t fallback);
std::uint64_t get_u64(const Json& cfg, const std::string& key);
bool get_bool(const Json& cfg, const std::string& key, bool fallback);
std::string get_string(const Json& cfg, const std::string& key);
/// A number is read as a one-element vector.
std::vector<double> get_doubles(const Json& cfg, const std::string& key);
std::vector<double> get_doubles(const Json& cfg, const std::string& key,
                                std::vector<double> fallback);
/// Strictly decreasing positive schedule.
std::vector<double> get_schedule(const Json& cfg, const std::string& key);

// Registry. Each block is {"kind": ..., "params": {...}}; `key` is the
// block's dotted path and prefixes every error.
std::shared_ptr<CoefficientModel> make_model(const Json& cfg, const std::string& key = "model");
VolPtr make_vol(const Json& cfg, const std::string& key);
std::shared_ptr<TerminalFunctional> make_payoff(const Json& cfg,
                                                const std::string& key = "payoff");
std::shared_ptr<Domain> make_domain(const Json& cfg, const std::string& key = "domain");

std::vector<std::string> model_kinds();
std::vector<std::string> vol_kinds();
std::vector<std::string> payoff_kinds();
std::vector<std::string> domain_kinds();

/// The volatility functional behind a scalar model block (constant,
/// *_vol or log_price).
VolPtr vol_of_model(const Json& cfg, const std::string& key = "model");

TimeGrid make_grid(const Json& cfg);
std::vector<double> make_x0(const Json& cfg, std::size_t state_dim);
rate::OptimizerOptions make_optimizer(const Json& cfg, std::uint64_t seed, std::size_t threads);
rate::ExitOptions make_exit_options(const Json& cfg, std::uint64_t seed, std::size_t threads);
mc::McConfig make_mc(const Json& cfg, const TimeGrid& grid, std::uint64_t seed,
                     std::size_t threads);

/// Rejects unknown top-level keys.
void check_top_level(const Json& cfg);

}  // namespace ldplab
