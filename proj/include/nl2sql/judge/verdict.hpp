#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nl2sql/retrieval/types.hpp"

namespace nl2sql::judge {

enum class Mode { exe, qse, sse };
enum class Outcome { passed, failed, skipped };

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Outcome outcome) noexcept;
/// "exe", "qse", "sse" (case-insensitive); ConfigError otherwise.
Mode parse_mode(std::string_view name);

struct EvalItem {
  std::string id;
  std::string query;
  std::optional<std::string> sql_gen;
  std::optional<std::string> sql_gold;
  std::optional<std::string> db_ref;
  std::optional<retrieval::RetrievalContext> context;
};

struct Verdict {
  Mode mode = Mode::exe;
  Outcome outcome = Outcome::skipped;
  std::string rationale;  // non-empty unless passed
  std::string raw;        // judge output(s) or canonical result forms
  bool parse_failure = false;
  bool dataset_defect = false;   // gold SQL failed to execute
  bool missing_fields = false;   // item lacks what the mode needs
  bool judge_unavailable = false;
  bool truncated = false;

  bool passed() const noexcept { return outcome == Outcome::passed; }
};

/// Parsed form of one judge reply. `consistent` is empty when no line
/// carries a verdict token.
struct ParsedVerdict {
  std::optional<bool> consistent;
  std::string rationale;
};

/// Finds the last line of the form
///   [prefix] VERDICT [sep] : [sep] CONSISTENT|INCONSISTENT [rest]
/// where prefix is any run of spaces, tabs, '>', '*', '#', '_', '`', '-';
/// sep is any run of spaces, tabs, '*', '_', '`'; matching is
/// case-insensitive and the token must end at a non-word character. Total over
/// all inputs.
ParsedVerdict parse_verdict(std::string_view output);

EvalItem item_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EvalItem& item);
nlohmann::json to_json(const Verdict& verdict);

}  // namespace nl2sql::judge
