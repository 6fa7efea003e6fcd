#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nathedge::text {

/// Shortest decimal form that parses back to the identical double.
std::string shortest(double v);

/// Fixed-point with the given number of decimals; used for SVG coordinates.
std::string fixed(double v, int decimals);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);

bool parse_int(std::string_view s, int& out) noexcept;
bool parse_double(std::string_view s, double& out) noexcept;

}  // namespace nathedge::text
