#include "lense/config.hpp"

#include <fstream>
#include <sstream>

#include "lense/errors.hpp"

namespace lense {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  Config c;
  c.parse_into(read_file(path), path.parent_path(), 0);
  return c;
}

Config Config::parse(const std::string& text, const std::filesystem::path& base_dir) {
  Config c;
  c.parse_into(text, base_dir, 0);
  return c;
}

void Config::parse_into(const std::string& text, const std::filesystem::path& base_dir, int depth) {
  if (depth > 16) throw ConfigError("config includes nested too deeply (cycle?)");
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty config key");
    if (key == "include") {
      const std::filesystem::path inc = base_dir / value;
      parse_into(read_file(inc), inc.parent_path(), depth + 1);
    } else {
      values_[key] = value;
    }
  }
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("config key '" + key + "' is not an integer: " + v);
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::size_t Config::get_size(const std::string& key) const {
  const long long v = get_int(key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  return has(key) ? get_size(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("config key '" + key + "' is not a number: " + v);
  return out;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    Config tmp;
    tmp.set(key, trim(item));
    out.push_back(tmp.get_double(key));
  }
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
}

std::string Config::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace lense
