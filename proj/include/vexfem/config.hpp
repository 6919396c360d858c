#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vexfem {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line_number)
      : std::runtime_error("config line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  explicit ConfigError(const std::string& what)
      : std::runtime_error(what), line(0) {}
  int line;
};

/// Line-oriented `key = value` experiment config with dotted keys for nested
/// records and `#` comments. Getters mark keys as consumed so typos can be
/// reported with their line numbers.
class Config {
 public:
  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      const std::string stripped = strip_comment(line);
      if (trim(stripped).empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ConfigError("expected 'key = value'", line_number);
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", line_number);
      for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
              c == '-'))
          throw ConfigError("invalid character in key '" + key + "'", line_number);
      if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_number);
      if (cfg.entries_.count(key))
        throw ConfigError("duplicate key '" + key + "' (first at line " +
                              std::to_string(cfg.entries_[key].line) + ")",
                          line_number);
      cfg.entries_[key] = {value, line_number};
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError("missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second.value;
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  double get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
  }

  double get_double_or(const std::string& key, double fallback) const {
    consumed_.insert(key);
    if (!has(key)) return fallback;
    return parse_double(key, entries_.at(key).value);
  }

  int get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (double(i) != v)
      throw ConfigError("key '" + key + "' must be an integer", line_of(key));
    return i;
  }

  int get_int_or(const std::string& key, int fallback) const {
    consumed_.insert(key);
    return has(key) ? get_int(key) : fallback;
  }

  std::uint64_t get_uint64_or(const std::string& key, std::uint64_t fallback) const {
    consumed_.insert(key);
    if (!has(key)) return fallback;
    const std::string text = entries_.at(key).value;
    std::uint64_t out = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      throw ConfigError("key '" + key + "' must be a nonnegative integer",
                        line_of(key));
    return out;
  }

  bool get_bool_or(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    if (!has(key)) return fallback;
    const std::string v = entries_.at(key).value;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "' must be true/false", line_of(key));
  }

  std::vector<double> get_double_list(const std::string& key) const {
    const std::string text = get_string(key);
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'", line_of(key));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : get_double_list(key)) {
      const int i = static_cast<int>(v);
      if (double(i) != v)
        throw ConfigError("key '" + key + "' must list integers", line_of(key));
      out.push_back(i);
    }
    return out;
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  /// After a command consumed its keys, anything untouched is a typo.
  void require_all_consumed() const {
    for (const auto& [key, entry] : entries_)
      if (!consumed_.count(key))
        throw ConfigError("unknown key '" + key + "'", entry.line);
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
  }

  static std::string trim(const std::string& text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
  }

  double parse_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' has non-numeric value '" + text + "'",
                        line_of(key));
    }
  }

  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> consumed_;
};

}  // namespace vexfem
