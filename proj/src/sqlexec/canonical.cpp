#include "nl2sql/sqlexec/canonical.hpp"

#include <algorithm>

namespace nl2sql::sqlexec {

CanonicalCell canonical_cell(const Value& value) {
  if (std::holds_alternative<std::monostate>(value)) return {CanonicalCell::kNull, ""};
  if (std::holds_alternative<std::string>(value)) return {CanonicalCell::kText, std::get<std::string>(value)};
  return {CanonicalCell::kNumber, render_scalar(value)};
}

CanonicalResult canonicalize(const ResultTable& result, bool order_sensitive) {
  CanonicalResult out;
  out.column_count = result.columns.size();
  out.truncated = result.truncated;
  out.rows.reserve(result.rows.size());
  for (const auto& row : result.rows) {
    std::vector<CanonicalCell> cells;
    cells.reserve(row.size());
    for (const auto& v : row) cells.push_back(canonical_cell(v));
    out.rows.push_back(std::move(cells));
  }
  if (!order_sensitive) std::sort(out.rows.begin(), out.rows.end());
  return out;
}

namespace {
std::string show_row(const std::vector<CanonicalCell>& row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ", ";
    out += row[i].cls == CanonicalCell::kText ? "'" + row[i].text + "'" : (row[i].cls == CanonicalCell::kNull ? "NULL" : row[i].text);
  }
  return out + ")";
}
}  // namespace

Comparison compare_results(const ResultTable& generated, const ResultTable& gold, bool order_sensitive) {
  Comparison cmp;
  const CanonicalResult gen = canonicalize(generated, order_sensitive);
  const CanonicalResult ref = canonicalize(gold, order_sensitive);
  cmp.truncated = gen.truncated || ref.truncated;

  if (gen.column_count != ref.column_count) {
    cmp.diff = "column count differs: generated " + std::to_string(gen.column_count) + ", gold " +
               std::to_string(ref.column_count);
    return cmp;
  }
  if (gen.truncated != ref.truncated) {
    cmp.diff = std::string("only the ") + (gen.truncated ? "generated" : "gold") + " result was truncated";
    return cmp;
  }
  if (gen.rows.size() != ref.rows.size()) {
    cmp.diff = "row count differs: generated " + std::to_string(gen.rows.size()) + ", gold " +
               std::to_string(ref.rows.size());
    return cmp;
  }
  for (std::size_t i = 0; i < gen.rows.size(); ++i) {
    if (gen.rows[i] != ref.rows[i]) {
      cmp.diff = "first difference at row " + std::to_string(i + 1) + (order_sensitive ? "" : " (sorted)") +
                 ": generated " + show_row(gen.rows[i]) + ", gold " + show_row(ref.rows[i]);
      return cmp;
    }
  }
  cmp.equal = true;
  return cmp;
}

}  // namespace nl2sql::sqlexec
