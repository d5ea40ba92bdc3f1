#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace ingarch {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parses; throw std::invalid_argument on garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

}  // namespace ingarch
