#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ttp {

// Shortest decimal form that parses back to the identical double.
std::string format_number(double v);

// Strict double parse of a whole token; nullopt on trailing junk.
std::optional<double> parse_number(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string> split_csv_line(const std::string& line);

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

extern const char* const kToolVersion;

}  // namespace ttp
