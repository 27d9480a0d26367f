#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the file readers.
namespace cadence::text {

std::string_view trim(std::string_view s);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_ws(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

std::string read_file(const std::filesystem::path& path);

// Writes to `<path>.tmp` then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string format_double(double v, int significant_digits = 17);

}  // namespace cadence::text
