#ifndef FRACFLOW_CONFIG_HPP
#define FRACFLOW_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracflow {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// INI-style configuration: [section] headers, key = value lines,
/// '#' / ';' comments. Parse errors carry line numbers.
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str(), path);
  }

  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::string s = strip(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
        section = strip(s.substr(1, s.size() - 2));
        if (section.empty())
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = strip(s.substr(0, eq));
      std::string val = strip(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      cfg.values_[section + "." + key] = val;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& section, const std::string& key) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end())
      throw ConfigError("missing required key [" + section + "] " + key);
    return it->second;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : to_double(it->second, section, key);
  }

  int get_int(const std::string& section, const std::string& key, int fallback) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) return fallback;
    try {
      size_t pos = 0;
      int v = std::stoi(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("[" + section + "] " + key + ": not an integer: " + it->second);
    }
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("[" + section + "] " + key + ": not a boolean: " + v);
  }

  std::vector<double> get_double_list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) return out;
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      tok = strip(tok);
      if (!tok.empty()) out.push_back(to_double(tok, section, key));
    }
    return out;
  }

  std::vector<int> get_int_list(const std::string& section, const std::string& key) const {
    std::vector<int> out;
    for (double v : get_double_list(section, key)) out.push_back(static_cast<int>(v));
    return out;
  }

 private:
  static std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double to_double(const std::string& s, const std::string& section,
                          const std::string& key) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("[" + section + "] " + key + ": not a number: " + s);
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace fracflow

#endif  // FRACFLOW_CONFIG_HPP
