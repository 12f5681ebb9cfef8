#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcmccoup::exp {

// Validation failures; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scale { desk, paper };
std::string to_string(Scale s);
Scale scale_from_string(const std::string& s);

// Flat string map. Lists are comma separated; values keep their textual form so
// that the manifest reproduces exactly what was run.
class Config {
 public:
  // key=value lines ('#' comments) or a JSON object. A manifest (JSON with a
  // "config" object) is accepted as well; its seed/scale land in the map.
  static Config parse(const std::string& text, const std::string& origin);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value"
  void set_assignment(const std::string& assignment);
  void merge(const Config& other);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;

  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> nums(const std::string& key) const;
  std::vector<std::string> strs(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  nlohmann::ordered_json to_json() const;

 private:
  std::map<std::string, std::string> kv_;
};

struct Param {
  std::string key;
  std::string desk;
  std::string paper;
  std::string help;
};

// Defaults for the scale overlaid with `given`; unknown keys are rejected.
Config resolve(const std::vector<Param>& params, const Config& given, Scale scale,
               const std::string& experiment);

}  // namespace mcmccoup::exp
