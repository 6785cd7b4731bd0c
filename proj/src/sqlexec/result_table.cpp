#include "nl2sql/sqlexec/result_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nl2sql/common/error.hpp"

namespace nl2sql::sqlexec {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string render_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::trunc(v) == v && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace

std::string render_scalar(const Value& value) {
  return std::visit(overloaded{
                        [](std::monostate) { return std::string("NULL"); },
                        [](std::int64_t v) { return std::to_string(v); },
                        [](double v) { return render_double(v); },
                        [](const std::string& v) { return v; },
                        [](bool v) { return std::string(v ? "1" : "0"); },
                    },
                    value);
}

std::string render_table(const ResultTable& table, std::size_t max_rows) {
  const std::size_t shown = std::min(max_rows, table.rows.size());
  std::vector<std::size_t> width(table.columns.size(), 0);
  std::vector<std::vector<std::string>> cells(shown);
  for (std::size_t c = 0; c < table.columns.size(); ++c) width[c] = table.columns[c].size();
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < table.rows[r].size() && c < width.size(); ++c) {
      cells[r].push_back(render_scalar(table.rows[r][c]));
      width[c] = std::max(width[c], cells[r].back().size());
    }
  }
  auto line = [&](const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (c) out += " | ";
      out += values[c];
      if (c + 1 < values.size()) out.append(width[c] - values[c].size(), ' ');
    }
    return out + "\n";
  };
  std::string out = line(table.columns);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  out += line(rule);
  for (const auto& row : cells) out += line(row);
  const std::size_t hidden = table.rows.size() - shown;
  if (hidden > 0) out += "... (" + std::to_string(hidden) + " more rows not shown)\n";
  if (table.truncated) out += "... (result truncated at " + std::to_string(table.row_limit) + " rows)\n";
  if (table.rows.empty()) out += "(no rows)\n";
  return out;
}

nlohmann::json to_json(const Value& value) {
  return std::visit(overloaded{
                        [](std::monostate) { return nlohmann::json(nullptr); },
                        [](std::int64_t v) { return nlohmann::json(v); },
                        [](double v) { return nlohmann::json(v); },
                        [](const std::string& v) { return nlohmann::json(v); },
                        [](bool v) { return nlohmann::json(v); },
                    },
                    value);
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(to_json(v));
    rows.push_back(std::move(r));
  }
  return {{"columns", table.columns}, {"rows", std::move(rows)}, {"truncated", table.truncated},
          {"row_limit", table.row_limit}};
}

ResultTable result_from_json(const nlohmann::json& doc) {
  ResultTable t;
  try {
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    t.truncated = doc.value("truncated", false);
    t.row_limit = doc.value("row_limit", std::size_t{0});
    for (const auto& r : doc.at("rows")) {
      std::vector<Value> row;
      for (const auto& v : r) {
        if (v.is_null()) row.emplace_back(std::monostate{});
        else if (v.is_boolean()) row.emplace_back(v.get<bool>());
        else if (v.is_number_integer()) row.emplace_back(v.get<std::int64_t>());
        else if (v.is_number()) row.emplace_back(v.get<double>());
        else if (v.is_string()) row.emplace_back(v.get<std::string>());
        else throw ConfigError("unsupported cell value in result table");
      }
      if (row.size() != t.columns.size()) throw ConfigError("result row width does not match columns");
      t.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed result table: ") + e.what());
  }
  return t;
}

}  // namespace nl2sql::sqlexec
