#include "experiments.hpp"

#include <fstream>

namespace mcmccoup::exp {

namespace fs = std::filesystem;

#ifndef MCMCCOUP_VERSION
#define MCMCCOUP_VERSION "unknown"
#endif

std::string version_string() { return MCMCCOUP_VERSION; }

Context::Context(std::string experiment, Config cfg, std::uint64_t seed, Scale scale, fs::path out,
                 int threads, std::ostream& log)
    : experiment_(std::move(experiment)),
      cfg_(std::move(cfg)),
      seed_(seed),
      scale_(scale),
      out_(std::move(out)),
      threads_(threads),
      log_(log) {}

fs::path Context::file(const std::string& name) {
  if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
  return out_ / name;
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (auto* part : {&spherical_experiments, &elliptical_experiments, &svm_experiments, &hug_hop_experiments})
      for (auto& e : (*part)()) v.push_back(std::move(e));
    v.push_back(validate_experiment());
    return v;
  }();
  return all;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  std::string names;
  for (const auto& e : registry()) names += (names.empty() ? "" : ", ") + e.name;
  throw ConfigError("unknown experiment '" + name + "' (one of: " + names + ")");
}

int run_experiment(const RunRequest& req, std::ostream& log) {
  const Experiment& e = find_experiment(req.experiment);
  Config given = req.config;
  std::optional<std::uint64_t> seed = req.seed;
  if (!seed && given.has("seed")) seed = given.u64("seed");
  if (!seed) throw ConfigError("field 'seed': missing (pass --seed or set seed in the config)");
  Scale scale = req.scale ? *req.scale : given.has("scale") ? scale_from_string(given.str("scale")) : Scale::desk;
  Config stripped;
  for (const auto& [k, v] : given.entries())
    if (k != "seed" && k != "scale") stripped.set(k, v);
  const Config cfg = resolve(e.params, stripped, scale, e.name);
  if (req.threads < 1) throw ConfigError("field 'threads': must be >= 1");

  const fs::path out = req.out_dir ? fs::path(*req.out_dir) : fs::path("out") / e.name;
  const bool fresh = !fs::exists(out);
  fs::create_directories(out);
  Context ctx(e.name, cfg, *seed, scale, out, req.threads, log);
  int status;
  try {
    status = e.run(ctx);
  } catch (...) {
    std::error_code ec;
    for (const auto& f : ctx.outputs()) fs::remove(out / f, ec);
    fs::remove(out / "manifest.json", ec);
    if (fresh && fs::is_empty(out, ec)) fs::remove(out, ec);
    throw;
  }
  nlohmann::ordered_json m;
  m["experiment"] = e.name;
  m["version"] = version_string();
  m["seed"] = *seed;
  m["scale"] = to_string(scale);
  m["config"] = cfg.to_json();
  m["outputs"] = ctx.outputs();
  m["status"] = status;
  std::ofstream f(out / "manifest.json", std::ios::binary | std::ios::trunc);
  f << m.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + (out / "manifest.json").string());
  return status;
}

}  // namespace mcmccoup::exp
