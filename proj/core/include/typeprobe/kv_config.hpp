#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace typeprobe {

/// INI text: "key = value" lines, ';' or '#' comment lines, and "[name]"
/// sections whose keys are stored as "name.key". Duplicate keys or sections
/// throw ConfigError.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;
  /// Throws ConfigError when present but not a number.
  std::optional<double> get_double(std::string_view key) const;
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  /// Section names in first-appearance order.
  const std::vector<std::string>& sections() const { return sections_; }
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

  /// Sorted "key = value" lines (no sections).
  std::string serialize() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::vector<std::string> sections_;
};

}  // namespace typeprobe
