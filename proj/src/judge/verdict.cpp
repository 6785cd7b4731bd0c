#include "nl2sql/judge/verdict.hpp"

#include <cctype>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/sqlexec/result_table.hpp"

namespace nl2sql::judge {
namespace {

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_';
}

bool in_set(char c, std::string_view set) { return set.find(c) != std::string_view::npos; }

bool starts_with_icase(std::string_view s, std::size_t at, std::string_view word) {
  return s.size() - at >= word.size() && text::iequals(s.substr(at, word.size()), word);
}

struct LineMatch {
  bool consistent = false;
  std::string_view rest;
};

std::optional<LineMatch> match_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && in_set(line[i], " \t>*#_`-")) ++i;
  if (!starts_with_icase(line, i, "verdict")) return std::nullopt;
  i += 7;
  while (i < line.size() && in_set(line[i], " \t*_`")) ++i;
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  ++i;
  while (i < line.size() && in_set(line[i], " \t*_`")) ++i;
  LineMatch m;
  std::size_t len = 0;
  if (starts_with_icase(line, i, "consistent")) {
    m.consistent = true;
    len = 10;
  } else if (starts_with_icase(line, i, "inconsistent")) {
    len = 12;
  } else {
    return std::nullopt;
  }
  if (i + len < line.size() && is_word_char(line[i + len])) return std::nullopt;
  m.rest = line.substr(i + len);
  return m;
}

// Strips markdown emphasis and separators left after the verdict token.
std::string clean_rest(std::string_view rest) {
  static const std::string_view kDashes[] = {"\xE2\x80\x94", "\xE2\x80\x93"};
  auto s = std::string(text::trim(rest));
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    while (!s.empty() && in_set(s.front(), "*_`-:.,; \t")) {
      s.erase(s.begin());
      changed = true;
    }
    for (auto dash : kDashes) {
      if (s.rfind(dash, 0) == 0) {
        s.erase(0, dash.size());
        changed = true;
      }
    }
  }
  return std::string(text::trim(s));
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::exe: return "exe";
    case Mode::qse: return "qse";
    case Mode::sse: return "sse";
  }
  return "exe";
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::passed: return "passed";
    case Outcome::failed: return "failed";
    case Outcome::skipped: return "skipped";
  }
  return "skipped";
}

Mode parse_mode(std::string_view name) {
  const auto n = text::to_lower(text::trim(name));
  if (n == "exe") return Mode::exe;
  if (n == "qse") return Mode::qse;
  if (n == "sse") return Mode::sse;
  throw ConfigError("unknown evaluation mode '" + std::string(name) + "' (expected exe, qse or sse)");
}

ParsedVerdict parse_verdict(std::string_view output) {
  ParsedVerdict out;
  std::size_t verdict_start = std::string_view::npos;
  std::size_t start = 0;
  while (start <= output.size()) {
    auto end = output.find('\n', start);
    if (end == std::string_view::npos) end = output.size();
    auto line = output.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto m = match_line(line)) {
      out.consistent = m->consistent;
      out.rationale = clean_rest(m->rest);
      verdict_start = start;
    }
    if (end == output.size()) break;
    start = end + 1;
  }
  if (!out.consistent) return out;
  if (out.rationale.empty()) out.rationale = text::single_line(text::trim(output.substr(0, verdict_start)));
  if (out.rationale.empty()) out.rationale = *out.consistent ? "judge returned CONSISTENT" : "judge returned INCONSISTENT";
  return out;
}

EvalItem item_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("eval item must be a JSON object");
  auto opt = [&](const char* key) -> std::optional<std::string> {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    if (!doc[key].is_string()) throw ConfigError(std::string("eval item field '") + key + "' must be a string");
    return doc[key].get<std::string>();
  };
  EvalItem item;
  auto id = opt("id");
  if (!id || id->empty()) throw ConfigError("eval item has no id");
  item.id = *id;
  item.query = opt("query").value_or("");
  item.sql_gen = opt("sql_gen");
  item.sql_gold = opt("sql_gold");
  item.db_ref = opt("db_ref");
  if (doc.contains("context") && !doc["context"].is_null()) {
    retrieval::RetrievalContext ctx;
    ctx.query = item.query;
    const auto& c = doc["context"];
    if (c.is_string()) {
      ctx.rendered = c.get<std::string>();
    } else if (c.is_object() && c.contains("rendered") && c["rendered"].is_string()) {
      ctx.rendered = c["rendered"].get<std::string>();
    } else {
      throw ConfigError("eval item context must be a string or an object with 'rendered'");
    }
    item.context = std::move(ctx);
  }
  return item;
}

nlohmann::json to_json(const EvalItem& item) {
  nlohmann::json j = {{"id", item.id}, {"query", item.query}};
  if (item.sql_gen) j["sql_gen"] = *item.sql_gen;
  if (item.sql_gold) j["sql_gold"] = *item.sql_gold;
  if (item.db_ref) j["db_ref"] = *item.db_ref;
  if (item.context) j["context"] = item.context->rendered;
  return j;
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json flags = nlohmann::json::array();
  if (v.parse_failure) flags.push_back("parse_failure");
  if (v.dataset_defect) flags.push_back("dataset_defect");
  if (v.missing_fields) flags.push_back("missing_fields");
  if (v.judge_unavailable) flags.push_back("judge_unavailable");
  if (v.truncated) flags.push_back("truncated");
  return {{"mode", to_string(v.mode)},
          {"outcome", to_string(v.outcome)},
          {"passed", v.passed()},
          {"rationale", v.rationale},
          {"raw", v.raw},
          {"flags", std::move(flags)}};
}

}  // namespace nl2sql::judge
