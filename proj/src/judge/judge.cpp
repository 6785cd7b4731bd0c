#include "nl2sql/judge/judge.hpp"

#include <cstdio>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/parallel.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/sql/parser.hpp"
#include "nl2sql/sqlexec/canonical.hpp"

namespace nl2sql::judge {
namespace {

const llm::TemplateRegistry& registry(const JudgeOptions& options) {
  return options.templates ? *options.templates : llm::TemplateRegistry::builtin();
}

Verdict missing(Mode mode, std::string what) {
  Verdict v;
  v.mode = mode;
  v.outcome = Outcome::skipped;
  v.missing_fields = true;
  v.rationale = "missing " + std::move(what);
  return v;
}

bool has_text(const std::optional<std::string>& s) { return s && !text::trim(*s).empty(); }

Verdict unavailable(Mode mode, const std::exception& e) {
  Verdict v;
  v.mode = mode;
  v.outcome = Outcome::skipped;
  v.judge_unavailable = true;
  v.rationale = "judge unavailable: " + text::single_line(e.what());
  return v;
}

Verdict ask_judge(Mode mode, const std::string& prompt, const llm::ModelRef& model, llm::Provider& provider,
                  const JudgeOptions& options) {
  std::string reply;
  try {
    reply = llm::complete_with_retry(provider, model, prompt, options.retry).text;
  } catch (const TransportError& e) {
    return unavailable(mode, e);
  } catch (const CassetteMissError& e) {
    return unavailable(mode, e);
  }
  return judge_reply(mode, reply, model, provider, options);
}

}  // namespace

OrderPolicy parse_order_policy(std::string_view name) {
  const auto n = text::to_lower(text::trim(name));
  if (n == "auto" || n == "automatic") return OrderPolicy::automatic;
  if (n == "always") return OrderPolicy::always;
  if (n == "never") return OrderPolicy::never;
  throw ConfigError("unknown order sensitivity policy '" + std::string(name) + "' (expected auto, always or never)");
}

std::string_view to_string(OrderPolicy policy) noexcept {
  switch (policy) {
    case OrderPolicy::automatic: return "auto";
    case OrderPolicy::always: return "always";
    case OrderPolicy::never: return "never";
  }
  return "auto";
}

bool order_sensitive(std::string_view sql_gold, OrderPolicy policy, sql::Dialect dialect) {
  switch (policy) {
    case OrderPolicy::always: return true;
    case OrderPolicy::never: return false;
    case OrderPolicy::automatic: break;
  }
  try {
    return sql::parse_statement(sql_gold, dialect).top_level_order_by;
  } catch (const SqlParseError&) {
    return false;
  }
}

sqlexec::ConnectionSpec resolve_db(const EvalItem& item, const std::optional<sqlexec::ConnectionSpec>& fallback) {
  if (item.db_ref && !item.db_ref->empty()) return sqlexec::ConnectionSpec::parse(*item.db_ref);
  if (fallback) return *fallback;
  throw ConfigError("item '" + item.id + "' has no db_ref and no default database is configured");
}

Verdict exe_score(const EvalItem& item, const sqlexec::ConnectionSpec& db, const ExeOptions& options) {
  if (!has_text(item.sql_gold)) return missing(Mode::exe, "sql_gold");
  if (!has_text(item.sql_gen)) return missing(Mode::exe, "sql_gen");

  Verdict v;
  v.mode = Mode::exe;
  sqlexec::ResultTable gold;
  try {
    gold = sqlexec::execute_sql(*item.sql_gold, db, options.exec);
  } catch (const DbConnectionError&) {
    throw;
  } catch (const Error& e) {
    v.outcome = Outcome::skipped;
    v.dataset_defect = true;
    v.rationale = std::string("gold SQL failed (") + e.kind() + "): " + text::single_line(e.what());
    return v;
  }
  sqlexec::ResultTable gen;
  try {
    gen = sqlexec::execute_sql(*item.sql_gen, db, options.exec);
  } catch (const DbConnectionError&) {
    throw;
  } catch (const Error& e) {
    v.outcome = Outcome::failed;
    v.rationale = std::string("generated SQL failed (") + e.kind() + "): " + text::single_line(e.what());
    return v;
  }

  const bool ordered = order_sensitive(*item.sql_gold, options.order_policy, options.exec.dialect);
  const auto cmp = sqlexec::compare_results(gen, gold, ordered);
  v.truncated = cmp.truncated;
  v.outcome = cmp.equal ? Outcome::passed : Outcome::failed;
  v.rationale = cmp.equal ? "result sets match" : cmp.diff;
  v.raw = "gen_rows=" + std::to_string(gen.rows.size()) + " gold_rows=" + std::to_string(gold.rows.size()) +
          " order_sensitive=" + (ordered ? "true" : "false");
  return v;
}

Verdict judge_reply(Mode mode, const std::string& first_reply, const llm::ModelRef& model, llm::Provider& provider,
                    const JudgeOptions& options) {
  Verdict v;
  v.mode = mode;
  v.raw = first_reply;
  auto parsed = parse_verdict(first_reply);
  if (!parsed.consistent) {
    std::string second;
    try {
      second = llm::complete_with_retry(provider, model,
                                        registry(options).render(options.repair_template, {{"previous", first_reply}}),
                                        options.retry)
                   .text;
    } catch (const Error&) {
      // A failed repair request counts as an unparseable reply.
    }
    v.raw += "\n--- repair ---\n" + second;
    parsed = parse_verdict(second);
  }
  if (!parsed.consistent) {
    v.outcome = Outcome::failed;
    v.parse_failure = true;
    v.rationale = "unparseable judge output";
    return v;
  }
  v.outcome = *parsed.consistent ? Outcome::passed : Outcome::failed;
  v.rationale = parsed.rationale;
  return v;
}

Verdict qse_score(const EvalItem& item, const llm::ModelRef& model, llm::Provider& provider,
                  const JudgeOptions& options) {
  if (text::trim(item.query).empty()) return missing(Mode::qse, "query");
  if (!has_text(item.sql_gen)) return missing(Mode::qse, "sql_gen");
  const auto context = item.context && !item.context->rendered.empty() ? item.context->rendered : std::string("none");
  const auto prompt =
      registry(options).render(options.qse_template, {{"query", item.query}, {"sql", *item.sql_gen}, {"context", context}});
  return ask_judge(Mode::qse, prompt, model, provider, options);
}

Verdict sse_score(const EvalItem& item, const llm::ModelRef& model, llm::Provider& provider,
                  const JudgeOptions& options) {
  if (!has_text(item.sql_gold)) return missing(Mode::sse, "sql_gold");
  if (!has_text(item.sql_gen)) return missing(Mode::sse, "sql_gen");
  const auto prompt =
      registry(options).render(options.sse_template, {{"sql_gen", *item.sql_gen}, {"sql_gold", *item.sql_gold}});
  return ask_judge(Mode::sse, prompt, model, provider, options);
}

std::optional<double> ModeCounts::percentage() const {
  const auto denominator = passed + failed;
  if (denominator == 0) return std::nullopt;
  return 100.0 * static_cast<double>(passed) / static_cast<double>(denominator);
}

EvalReport aggregate(std::vector<ItemVerdicts> items, const std::vector<Mode>& modes, std::string method) {
  EvalReport report;
  report.method = std::move(method);
  report.modes = modes;
  for (auto m : modes) report.counts[m] = {};
  for (const auto& item : items) {
    for (auto m : modes) {
      auto& c = report.counts[m];
      auto it = item.verdicts.find(m);
      if (it == item.verdicts.end()) {
        ++c.skipped;
        continue;
      }
      switch (it->second.outcome) {
        case Outcome::passed: ++c.passed; break;
        case Outcome::failed: ++c.failed; break;
        case Outcome::skipped: ++c.skipped; break;
      }
    }
  }
  report.items = std::move(items);
  return report;
}

EvalReport evaluate_dataset(const std::vector<EvalItem>& items, const EvalConfig& config) {
  std::vector<Mode> modes;
  for (auto m : config.modes)
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  if (modes.empty()) throw ConfigError("no evaluation modes selected");
  const bool exe = std::find(modes.begin(), modes.end(), Mode::exe) != modes.end();
  const bool qse = std::find(modes.begin(), modes.end(), Mode::qse) != modes.end();
  const bool sse = std::find(modes.begin(), modes.end(), Mode::sse) != modes.end();
  if (qse && (!config.qse_model || !config.qse_provider)) throw ConfigError("qse mode needs a judge model");
  if (sse && (!config.sse_model || !config.sse_provider)) throw ConfigError("sse mode needs a judge model");

  // Every database the batch touches must open before any item is scored.
  if (exe) {
    std::set<std::string> probed;
    for (const auto& item : items) {
      if (!has_text(item.sql_gold) || !has_text(item.sql_gen)) continue;
      const auto db = resolve_db(item, config.db);
      if (probed.insert(db.to_string()).second) sqlexec::probe(db, config.exe.exec.mode);
    }
  }

  auto score = [&](std::size_t i) {
    const auto& item = items[i];
    ItemVerdicts out;
    out.id = item.id;
    for (auto m : modes) {
      Verdict v;
      switch (m) {
        case Mode::exe:
          v = has_text(item.sql_gold) && has_text(item.sql_gen)
                  ? exe_score(item, resolve_db(item, config.db), config.exe)
                  : exe_score(item, sqlexec::ConnectionSpec{}, config.exe);
          break;
        case Mode::qse: v = qse_score(item, *config.qse_model, *config.qse_provider, config.judge); break;
        case Mode::sse: v = sse_score(item, *config.sse_model, *config.sse_provider, config.judge); break;
      }
      out.verdicts.emplace(m, std::move(v));
    }
    return out;
  };
  return aggregate(ordered_parallel_map(items.size(), config.parallelism, score), modes, config.method);
}

std::string format_percentage(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json percentages = nlohmann::json::object();
  for (auto m : report.modes) {
    const auto& c = report.counts.at(m);
    const auto key = std::string(to_string(m));
    counts[key] = {{"passed", c.passed}, {"failed", c.failed}, {"skipped", c.skipped}};
    const auto pct = c.percentage();
    percentages[key] = pct ? nlohmann::json(*pct) : nlohmann::json(nullptr);
  }
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : report.items) {
    nlohmann::json verdicts = nlohmann::json::object();
    for (auto m : report.modes) {
      auto it = item.verdicts.find(m);
      if (it != item.verdicts.end()) verdicts[std::string(to_string(m))] = to_json(it->second);
    }
    items.push_back({{"id", item.id}, {"verdicts", std::move(verdicts)}});
  }
  nlohmann::json modes = nlohmann::json::array();
  for (auto m : report.modes) modes.push_back(to_string(m));
  return {{"method", report.method},
          {"modes", std::move(modes)},
          {"counts", std::move(counts)},
          {"percentages", std::move(percentages)},
          {"items", std::move(items)}};
}

std::string render_report_table(const EvalReport& report) {
  std::vector<std::string> header = {"Method"};
  std::vector<std::string> row = {report.method};
  for (auto m : report.modes) {
    header.push_back(text::to_upper(to_string(m)) + " (%)");
    const auto pct = report.counts.at(m).percentage();
    row.push_back(pct ? format_percentage(*pct) : "n/a");
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = std::max(header[c].size(), row[c].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += " | ";
      out += cells[c];
      if (c + 1 < cells.size()) out.append(width[c] - cells[c].size(), ' ');
    }
    return out + "\n";
  };
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  std::string out = line(header) + line(rule) + line(row) + "\n";
  for (auto m : report.modes) {
    const auto& c = report.counts.at(m);
    out += text::to_upper(to_string(m)) + ": passed " + std::to_string(c.passed) + ", failed " +
           std::to_string(c.failed) + ", skipped " + std::to_string(c.skipped) + "\n";
  }
  return out;
}

}  // namespace nl2sql::judge
