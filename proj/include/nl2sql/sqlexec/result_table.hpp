#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nl2sql::sqlexec {

using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;  // each row has columns.size() values
  bool truncated = false;                // source had more than row_limit rows
  std::size_t row_limit = 0;

  bool operator==(const ResultTable&) const = default;
};

/// Canonical scalar text: NULL, integers as-is, floats with 9 significant
/// digits (integral floats print as integers), bools as 1/0, text verbatim.
std::string render_scalar(const Value& value);

/// Aligned text table; rows past `max_rows` are replaced by a marker line.
std::string render_table(const ResultTable& table, std::size_t max_rows = 20);

nlohmann::json to_json(const Value& value);
nlohmann::json to_json(const ResultTable& table);
ResultTable result_from_json(const nlohmann::json& doc);

}  // namespace nl2sql::sqlexec
