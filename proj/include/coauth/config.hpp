#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coauth {

/// Flat "key = value" text; '#' starts a comment line. Later assignments
/// override earlier ones.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, std::string_view origin = "config");
  static KeyValueFile load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  /// Entries in key order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string serialize() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace coauth
