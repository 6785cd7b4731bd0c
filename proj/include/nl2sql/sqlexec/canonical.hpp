#pragma once

#include <compare>
#include <string>
#include <vector>

#include "nl2sql/sqlexec/result_table.hpp"

namespace nl2sql::sqlexec {

/// A cell reduced to (type class, canonical text). Classes order NULL before
/// numbers before text, so sorting puts nulls first.
struct CanonicalCell {
  enum Class : int { kNull = 0, kNumber = 1, kText = 2 };
  int cls = kNull;
  std::string text;

  auto operator<=>(const CanonicalCell&) const = default;
};

/// Values-only canonical form: column names are dropped, column order kept.
struct CanonicalResult {
  std::size_t column_count = 0;
  std::vector<std::vector<CanonicalCell>> rows;
  bool truncated = false;

  bool operator==(const CanonicalResult&) const = default;
};

CanonicalCell canonical_cell(const Value& value);

/// order_sensitive = false sorts rows by the total order over canonical cells;
/// true keeps engine order.
CanonicalResult canonicalize(const ResultTable& result, bool order_sensitive);

struct Comparison {
  bool equal = false;
  bool truncated = false;  // either side was truncated
  std::string diff;        // empty when equal
};

/// Equal when canonical forms match. A truncated side only matches another
/// truncated side with an identical prefix.
Comparison compare_results(const ResultTable& generated, const ResultTable& gold, bool order_sensitive);

}  // namespace nl2sql::sqlexec
