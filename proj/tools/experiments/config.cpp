#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcmccoup/io.hpp"

namespace mcmccoup::exp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ConfigError("field '" + key + "': unsupported JSON value " + v.dump());
}

std::string json_text(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) return scalar_text(v, key);
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + scalar_text(v[i], key);
  return out;
}

}  // namespace

std::string to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper") return Scale::paper;
  throw ConfigError("field 'scale': expected desk or paper, got '" + s + "'");
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    const nlohmann::json* body = &j;
    if (j.contains("config") && j["config"].is_object()) {
      body = &j["config"];
      for (const char* k : {"seed", "scale"})
        if (j.contains(k)) c.set(k, json_text(j[k], k));
    }
    for (const auto& [k, v] : body->items()) c.set(k, json_text(v, k));
    return c;
  }
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(n) + ": expected key=value, got '" + line + "'");
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  try {
    return parse(read_text_file(path), path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty configuration key");
  kv_[key] = value;
}

void Config::set_assignment(const std::string& a) {
  const auto eq = a.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + a + "' is not key=value");
  set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.kv_) kv_[k] = v;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("field '" + key + "': missing");
  return it->second;
}

std::string Config::str(const std::string& key) const { return raw(key); }

double Config::num(const std::string& key) const {
  const std::string& s = raw(key);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("field '" + key + "': expected a number, got '" + s + "'");
  return v;
}

long Config::integer(const std::string& key) const {
  const double v = num(key);
  if (v != std::floor(v) || std::fabs(v) > 9e15)
    throw ConfigError("field '" + key + "': expected an integer, got '" + raw(key) + "'");
  return static_cast<long>(v);
}

std::uint64_t Config::u64(const std::string& key) const {
  const std::string& s = raw(key);
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("field '" + key + "': expected a non-negative integer, got '" + s + "'");
  return v;
}

bool Config::flag(const std::string& key) const {
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("field '" + key + "': expected true or false, got '" + s + "'");
}

std::vector<std::string> Config::strs(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("field '" + key + "': empty list");
  return out;
}

std::vector<double> Config::nums(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : strs(key)) {
    Config one;
    one.set(key, item);
    out.push_back(one.num(key));
  }
  return out;
}

nlohmann::ordered_json Config::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : kv_) j[k] = v;
  return j;
}

Config resolve(const std::vector<Param>& params, const Config& given, Scale scale,
               const std::string& experiment) {
  Config out;
  for (const auto& p : params) out.set(p.key, scale == Scale::desk ? p.desk : p.paper);
  for (const auto& [k, v] : given.entries()) {
    bool known = false;
    for (const auto& p : params) known = known || p.key == k;
    if (!known) throw ConfigError("field '" + k + "': not a parameter of " + experiment);
    out.set(k, v);
  }
  return out;
}

}  // namespace mcmccoup::exp
