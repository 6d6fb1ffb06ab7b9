#include "config.hpp"

#include <cmath>
#include <fstream>

namespace qmri::cli {

Config Config::load(const std::optional<std::filesystem::path>& path) {
  if (!path) return Config();
  std::ifstream in(*path);
  if (!in) throw IoError("cannot open config " + path->string());
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError(path->string() + ": top level must be an object");
    return Config(std::move(j));
  } catch (const json::parse_error& e) {
    throw ConfigError(path->string() + ": " + e.what());
  }
}

void Config::apply_set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &root_;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: malformed key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    json& next = (*node)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key.substr(0, dot) + ": not an object");
    node = &next;
    start = dot + 1;
  }
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = root_.at(key);
  if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>())))
    throw ConfigError(key_path(key) + ": expected an integer");
  const double d = v.get<double>();
  if (d < 0) throw ConfigError(key_path(key) + ": must be >= 0");
  return static_cast<std::size_t>(d);
}

double Config::positive(const std::string& key, double fallback) const {
  const double v = get<double>(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key_path(key) + ": must be positive");
  return v;
}

Config Config::section(const std::string& key) const {
  if (!has(key)) return Config(json::object(), key_path(key));
  if (!root_.at(key).is_object()) throw ConfigError(key_path(key) + ": expected an object");
  return Config(root_.at(key), key_path(key));
}

void Config::only(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : root_.items())
    if (!allowed.count(k)) throw ConfigError(key_path(k) + ": unknown key");
}

}  // namespace qmri::cli
