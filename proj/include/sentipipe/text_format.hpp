#pragma once

// Small text helpers shared by the file formats: shortest round-trip number
// formatting, strict number parsing, CSV splitting and whole-file I/O.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sentipipe::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Fixed-point formatting for human-facing tables.
std::string format_fixed(double value, int decimals);

/// Whole-field parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view field, double& out);
bool parse_uint(std::string_view field, std::uint64_t& out);

/// Splits one CSV line on commas. Quoting is not supported; none of the
/// formats here put commas inside fields.
std::vector<std::string_view> split_csv(std::string_view line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sentipipe::text
