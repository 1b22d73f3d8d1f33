#include "coauth/config.hpp"

#include "coauth/error.hpp"
#include "coauth/io.hpp"

namespace coauth {

KeyValueFile KeyValueFile::parse(std::string_view text, std::string_view origin) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kConfig, std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty())
      throw Error(ErrorCode::kConfig, std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void KeyValueFile::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> KeyValueFile::entries() const {
  return {values_.begin(), values_.end()};
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + '\n';
  return out;
}

}  // namespace coauth
