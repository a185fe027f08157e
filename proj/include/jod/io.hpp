#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jod::io {

// Shortest round-trip scientific notation, independent of the C locale.
std::string format_double(double v);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::vector<std::string> split_csv(std::string_view line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace jod::io
