#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace nl2sql::app {

/// Bundled demo files (shop.sql, knowledge.jsonl, tables.jsonl, eval.jsonl,
/// scripted_rules.json, cassette.jsonl). Throws ConfigError for unknown names.
std::string_view demo_asset(std::string_view name);

inline constexpr std::string_view kDemoQuery =
    "What were the best-selling products of our competitors and ourselves over the past six months?";

struct DemoOptions {
  std::filesystem::path work_dir;  // receives shop.db
  /// Answer model calls with the scripted rules and write a fresh cassette
  /// here instead of replaying the bundled one.
  std::optional<std::filesystem::path> record_cassette;
};

/// Artifacts as the exact bytes written to disk.
struct DemoArtifacts {
  std::string context_json;
  std::string plan_json;
  std::string outcome_json;
  std::string trace_jsonl;
  std::string report_json;
  std::string report_txt;
  std::string answer;
};

/// Seeds the trade database, indexes the bundled knowledge and TableHub,
/// plans and runs the best-selling-products question, then scores the bundled
/// eval set in all three modes.
DemoArtifacts run_demo(const DemoOptions& options);

}  // namespace nl2sql::app
