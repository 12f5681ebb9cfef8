#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace mcmccoup::exp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitOracle = 3;

class Context {
 public:
  Context(std::string experiment, Config cfg, std::uint64_t seed, Scale scale,
          std::filesystem::path out, int threads, std::ostream& log);

  const std::string& experiment() const { return experiment_; }
  const Config& cfg() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  Scale scale() const { return scale_; }
  int threads() const { return threads_; }
  std::ostream& log() { return log_; }

  // Path of an output file inside the run directory; recorded for the manifest
  // and for cleanup when the run fails.
  std::filesystem::path file(const std::string& name);
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::filesystem::path& out_dir() const { return out_; }

 private:
  std::string experiment_;
  Config cfg_;
  std::uint64_t seed_;
  Scale scale_;
  std::filesystem::path out_;
  int threads_;
  std::ostream& log_;
  std::vector<std::string> outputs_;
};

struct Experiment {
  std::string name;
  std::string summary;
  std::vector<Param> params;
  std::function<int(Context&)> run;
};

const std::vector<Experiment>& registry();
const Experiment& find_experiment(const std::string& name);

struct RunRequest {
  std::string experiment;
  Config config;  // file contents merged with command line overrides
  std::optional<std::uint64_t> seed;
  std::optional<Scale> scale;
  std::optional<std::string> out_dir;
  int threads = 1;
};

// Resolves the configuration, runs, writes manifest.json. Throws ConfigError on
// invalid input; removes its own partial outputs when the run throws.
int run_experiment(const RunRequest& req, std::ostream& log);

std::string version_string();

// registry entries, one per translation unit
std::vector<Experiment> spherical_experiments();
std::vector<Experiment> elliptical_experiments();
std::vector<Experiment> svm_experiments();
std::vector<Experiment> hug_hop_experiments();
Experiment validate_experiment();

}  // namespace mcmccoup::exp
