#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvsde::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key = value" store. Later sets override earlier ones.
class Config {
 public:
  /// Parses lines of the form `key = value`; `#` starts a comment.
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void erase(const std::string& key) { values_.erase(key); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::optional<double> find_double(const std::string& key) const;
  std::optional<long long> find_int(const std::string& key) const;

  /// "1-20" or "1,3,5" (ranges and items may be mixed: "1-3,7").
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Throws ConfigError naming the first key not in `known`.
  void check_known(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& key, const std::string& text);
long long parse_int(const std::string& key, const std::string& text);
std::uint64_t parse_seed(const std::string& text);

}  // namespace mvsde::cli
