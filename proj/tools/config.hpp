#pragma once

// JSON run configuration with dotted-key overrides and typed lookups whose
// errors name the offending key.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmri/error.hpp"

namespace qmri::cli {

using nlohmann::json;

class Config {
 public:
  Config() : root_(json::object()) {}
  explicit Config(json root, std::string prefix = "") : root_(std::move(root)), prefix_(std::move(prefix)) {}

  static Config load(const std::optional<std::filesystem::path>& path);

  // "a.b.c=value"; value is parsed as JSON when it parses, otherwise taken as a string.
  void apply_set(const std::string& assignment);

  bool has(const std::string& key) const { return root_.contains(key) && !root_.at(key).is_null(); }
  std::string key_path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key_path(key) + ": required");
    try {
      return root_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(key_path(key) + ": wrong type (" + std::string(root_.at(key).type_name()) + ")");
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) const;
  double positive(const std::string& key, double fallback) const;

  Config section(const std::string& key) const;
  const json& raw(const std::string& key) const { return root_.at(key); }
  const json& root() const { return root_; }

  // Rejects keys outside `allowed`, naming the first unknown one.
  void only(const std::set<std::string>& allowed) const;

 private:
  json root_;
  std::string prefix_;
};

}  // namespace qmri::cli
