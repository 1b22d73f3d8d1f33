#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coauth {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; throws Error(kParse) naming `what`.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file then renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace coauth
