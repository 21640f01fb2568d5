#include "drlab/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drlab/harness/seeding.hpp"

namespace drlab::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has non-numeric value '" + value + "'");
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_text(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueConfig::raw(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  consumed_[key] = true;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) { return raw(key); }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  return raw(key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  return parse_double(key, raw(key));
}

double KeyValueConfig::require_double(const std::string& key) { return parse_double(key, raw(key)); }

int KeyValueConfig::get_int(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const double v = parse_double(key, raw(key));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config key '" + key + "' must be an integer");
  return i;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const std::string value = raw(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "' must be an unsigned integer");
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const std::string value = raw(key);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) {
  if (!has(key)) return fallback;
  const std::string value = raw(key);
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, trim(cell)));
  if (out.empty()) throw ConfigError("config key '" + key + "' has an empty list");
  return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) {
  if (!has(key)) return fallback;
  const std::string value = raw(key);
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (out.empty()) throw ConfigError("config key '" + key + "' has an empty list");
  return out;
}

void KeyValueConfig::reject_unconsumed() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values_)
    if (!consumed_.count(key)) unknown.push_back(key);
  if (!unknown.empty()) {
    std::string msg = "unknown config keys in " + origin_ + ":";
    for (const std::string& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }
}

std::string KeyValueConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

std::string KeyValueConfig::config_hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text())));
  return buf;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

}  // namespace drlab::harness
