#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lense {

/// Flat key=value configuration. Lines starting with '#' are comments;
/// `include = path` splices another file (relative to the including file) at
/// that point. Later assignments override earlier ones.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, const std::filesystem::path& base_dir = ".");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::size_t get_size(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError naming the first key outside `known`.
  void require_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  /// Canonical "key=value" lines in key order.
  std::string dump() const;

 private:
  void parse_into(const std::string& text, const std::filesystem::path& base_dir, int depth);

  std::map<std::string, std::string> values_;
};

}  // namespace lense
