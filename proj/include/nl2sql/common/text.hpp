#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nl2sql::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle) noexcept;

/// Runs of ASCII whitespace become a single space; leading/trailing removed.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Flattens a message onto one line (newlines and tabs become spaces).
std::string single_line(std::string_view s);

}  // namespace nl2sql::text
