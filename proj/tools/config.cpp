#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mvsde::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  // Accept integral floating forms such as 1e5.
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc() && ptr == last) return v;
  const double d = parse_double(key, text);
  if (d != static_cast<double>(static_cast<long long>(d))) throw ConfigError(key + ": not an integer: '" + text + "'");
  return static_cast<long long>(d);
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("seed: not an unsigned integer: '" + text + "'");
  return v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return find_double(key).value_or(fallback);
}

long long Config::get_int(const std::string& key, long long fallback) const { return find_int(key).value_or(fallback); }

std::optional<double> Config::find_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_double(key, it->second);
}

std::optional<long long> Config::find_int(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_int(key, it->second);
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split(it->second, ',')) {
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const auto lo = parse_int(key, trim(item.substr(0, dash)));
      const auto hi = parse_int(key, trim(item.substr(dash + 1)));
      if (hi < lo) throw ConfigError(key + ": empty range '" + item + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    } else {
      out.push_back(static_cast<int>(parse_int(key, item)));
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto out = split(it->second, ',');
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void Config::check_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace mvsde::cli
