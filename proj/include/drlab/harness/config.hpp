#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drlab::harness {

/// Thrown for malformed files, unknown keys and bad values; the CLI maps it
/// to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` text. Lines starting with '#' are comments.
/// Every key must be consumed by the pipeline that runs the config; leftover
/// keys are reported as errors so typos fail fast.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  double require_double(const std::string& key);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback);
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback);

  /// Throws ConfigError naming any key that was never read.
  void reject_unconsumed() const;

  /// Canonical text (sorted keys) and its FNV-1a hash; both stable across
  /// reruns for identical configs.
  std::string canonical_text() const;
  std::string config_hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  void set(const std::string& key, const std::string& value);

 private:
  std::string raw(const std::string& key);
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> consumed_;
  std::string origin_;
};

}  // namespace drlab::harness
