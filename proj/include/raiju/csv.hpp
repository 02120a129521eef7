#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace raiju::csv {

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Strict integer / real parsing of a whole field; false on any leftover text.
bool parse_int(std::string_view text, long long& out);
bool parse_double(std::string_view text, double& out);

}  // namespace raiju::csv
