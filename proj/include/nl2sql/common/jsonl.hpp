#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nl2sql::jsonl {

struct Line {
  std::size_t number = 0;  // 1-based
  std::string text;
};

/// Non-blank lines of a text file. Throws IoError naming the path.
std::vector<Line> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, creating parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Compact single-line dump; invalid UTF-8 is replaced rather than thrown.
std::string dump(const nlohmann::json& value);

/// Pretty dump with a trailing newline, for report-style artifacts.
std::string dump_pretty(const nlohmann::json& value);

std::string dump_lines(const std::vector<nlohmann::json>& rows);

}  // namespace nl2sql::jsonl
