// ldplab command-line entry point. Exit codes: 0 ok, 2 config error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ldplab/config.hpp"
#include "ldplab/error.hpp"
#include "ldplab/experiments.hpp"
#include "ldplab/parallel.hpp"
#include "ldplab/plot.hpp"

using namespace ldplab;

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError(flag, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(flag, "empty list");
  return out;
}

// Parameters used when --model names a kind the config does not describe.
Json default_model(const std::string& kind) {
  if (kind == "constant") return {{"kind", kind}, {"params", {{"drift", 0.0}, {"sigma", 0.2}}}};
  if (kind == "local_vol" || kind == "running_max_vol")
    return {{"kind", kind}, {"params", {{"center", 0.2}, {"amplitude", 0.05}}}};
  if (kind == "delay_vol")
    return {{"kind", kind}, {"params", {{"center", 0.2}, {"amplitude", 0.05}, {"delay", 0.1}}}};
  if (kind == "time_scaled_vol")
    return {{"kind", kind}, {"params", {{"base", 0.2}, {"slope", 0.5}}}};
  throw ConfigError("--model", "no default parameters for '" + kind +
                                   "'; pass a JSON block {\"kind\": ..., \"params\": ...}");
}

struct Flags {
  std::string config, out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

int report(const RunOutcome& r, const RunOptions& opts) {
  const auto& m = r.manifest;
  std::cout << m["experiment"].get<std::string>() << ": " << m["status"].get<std::string>();
  if (m["results"].contains("value")) std::cout << ", value " << m["results"]["value"].dump();
  std::cout << " (" << r.files.size() << " files in " << opts.out_dir.string() << ")\n";
  for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  if (m.contains("error")) {
    std::cerr << "error: " << m["error"].get<std::string>() << '\n'
              << "advisory: " << m["advisory"].get<std::string>() << '\n';
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large-deviation rates for path-dependent SDEs"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON experiment config");
  app.add_option("--out", f.out, "output directory")->capture_default_str();
  app.add_option("--seed", f.seed, "seed; overrides every seed in the config");
  app.add_option("--threads", f.threads, "worker threads (default: LDPLAB_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run the experiment named in the config");
  std::vector<std::pair<CLI::App*, std::string>> direct;
  for (const char* kind :
       {"rate-laplace", "rate-exit", "mc-laplace", "mc-exit", "convergence", "eikonal-check"})
    direct.emplace_back(app.add_subcommand(kind, std::string("run a ") + kind + " experiment"),
                        kind);

  auto* smile_cmd = app.add_subcommand("smile", "short-maturity smile asymptote");
  std::string k_list, model, eps_list, a_list;
  smile_cmd->add_option("--k", k_list, "log-moneyness, comma separated");
  smile_cmd->add_option("--model", model, "vol kind or JSON model block");
  smile_cmd->add_option("--eps-schedule", eps_list, "decreasing eps, comma separated");
  smile_cmd->add_option("--a-schedule", a_list, "decreasing negative a, comma separated");

  auto* flow_cmd = app.add_subcommand("flow", "controlled flow utilities");
  flow_cmd->require_subcommand(1);
  auto* dump = flow_cmd->add_subcommand("dump", "write the trajectory of a configured control");
  dump->fallthrough();

  auto* plot_cmd = app.add_subcommand("plot", "render a result CSV as SVG");
  std::string csv_path, svg_path;
  plot_cmd->add_option("csv", csv_path, "convergence or levels CSV")->required();
  plot_cmd->add_option("--svg", svg_path, "output file (default: <out>/<csv stem>.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunOptions opts;
  opts.out_dir = f.out;
  opts.seed = f.seed;
  opts.threads = f.threads.value_or(default_thread_count());

  try {
    if (*plot_cmd) {
      if (svg_path.empty()) {
        auto stem = std::filesystem::path(csv_path).stem().string();
        std::filesystem::create_directories(opts.out_dir);
        svg_path = (opts.out_dir / (stem + ".svg")).string();
      }
      plot_csv(csv_path, svg_path);
      std::cout << "wrote " << svg_path << '\n';
      return 0;
    }

    Json cfg = Json::object();
    if (!f.config.empty()) cfg = load_config(f.config);
    else if (!*smile_cmd) throw ConfigError("--config", "required");

    if (*smile_cmd) {
      opts.experiment = "smile";
      if (!model.empty()) {
        if (model.front() == '{') {
          try {
            cfg["model"] = Json::parse(model);
          } catch (const Json::parse_error& e) {
            throw ConfigError("--model", e.what());
          }
        } else if (!cfg.contains("model") || cfg["model"].value("kind", "") != model) {
          cfg["model"] = default_model(model);
        }
      }
      if (!cfg.contains("model")) cfg["model"] = default_model("constant");
      if (!k_list.empty()) cfg["smile"]["k"] = parse_list(k_list, "--k");
      if (!eps_list.empty()) cfg["smile"]["eps_schedule"] = parse_list(eps_list, "--eps-schedule");
      if (!a_list.empty()) cfg["smile"]["a_schedule"] = parse_list(a_list, "--a-schedule");
      if (!cfg.contains("grid")) cfg["grid"] = {{"T", 1.0}, {"N", 64}};
    } else if (*dump) {
      opts.experiment = "flow-dump";
    } else if (!*run) {
      for (const auto& [cmd, kind] : direct)
        if (*cmd) opts.experiment = kind;
    }
    return report(run_experiment(cfg, opts), opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
