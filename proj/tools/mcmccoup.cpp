#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiments.hpp"

namespace ex = mcmccoup::exp;

namespace {

void print_list(std::ostream& os, bool with_params) {
  for (const auto& e : ex::registry()) {
    os << e.name << "  " << e.summary << "\n";
    if (!with_params) continue;
    for (const auto& p : e.params)
      os << "    " << p.key << " = " << p.desk << " (paper: " << p.paper << ")  " << p.help << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled MCMC experiments", "mcmccoup"};
  app.set_version_flag("--version", ex::version_string());

  std::string experiment, config_path, scale, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  int threads = 1;
  bool list = false;

  app.add_option("experiment", experiment, "experiment name (see --list)");
  app.add_option("--config", config_path, "key=value or JSON configuration file");
  app.add_option("--seed", seed, "master seed (required here or in the config)");
  app.add_option("--scale", scale, "desk or paper defaults")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--out", out_dir, "output directory (default out/<experiment>)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "override a config entry, key=value (repeatable)");
  app.add_flag("--list", list, "list experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ex::kExitValidation;
  }

  if (list) {
    print_list(std::cout, true);
    return 0;
  }

  try {
    if (experiment.empty()) throw ex::ConfigError("missing experiment name");
    if (config_path.empty()) throw ex::ConfigError("--config is required");
    ex::RunRequest req;
    req.experiment = experiment;
    req.config = ex::Config::load(config_path);
    for (const auto& o : overrides) req.config.set_assignment(o);
    req.seed = seed;
    if (!scale.empty()) req.scale = ex::scale_from_string(scale);
    if (!out_dir.empty()) req.out_dir = out_dir;
    req.threads = threads;
    return ex::run_experiment(req, std::cerr);
  } catch (const ex::ConfigError& e) {
    std::cerr << "mcmccoup: " << e.what() << "\n";
    return ex::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "mcmccoup: " << experiment << " failed: " << e.what() << "\n";
    return 1;
  }
}
