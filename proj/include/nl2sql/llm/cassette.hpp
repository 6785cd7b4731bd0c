#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nl2sql/llm/provider.hpp"

namespace nl2sql::llm {

enum class CassetteMode { record, replay, passthrough };

CassetteMode parse_cassette_mode(std::string_view name);

/// Stable request identity: SHA-256 over a canonical JSON object of
/// model_id, prompt, temperature and max_tokens.
std::string fingerprint(const ModelRef& model, std::string_view prompt);

struct CassetteEntry {
  std::string fingerprint;
  std::string response_text;
};

/// Record/replay wrapper around another provider.
///
/// replay: serves recorded responses only; a miss throws CassetteMissError and
///         never reaches the inner provider.
/// record: forwards to the inner provider and appends each new fingerprint to
///         the cassette file as one JSONL line {fingerprint, response_text}.
/// passthrough: forwards without recording.
///
/// Replay lookups are read-only; recording serializes appends.
class CassetteProvider final : public Provider {
 public:
  /// Replay from an already-loaded list of entries.
  explicit CassetteProvider(std::vector<CassetteEntry> entries);
  CassetteProvider(CassetteMode mode, std::filesystem::path path, ProviderPtr inner);

  static std::vector<CassetteEntry> parse(std::string_view jsonl_text);
  static std::vector<CassetteEntry> load(const std::filesystem::path& path);

  Completion complete(const ModelRef& model, std::string_view prompt) override;
  std::string name() const override { return "cassette"; }

  CassetteMode mode() const noexcept { return mode_; }
  std::vector<CassetteEntry> entries() const;

 private:
  void index_entries();

  CassetteMode mode_;
  std::filesystem::path path_;
  ProviderPtr inner_;
  mutable std::mutex mu_;
  std::vector<CassetteEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_fingerprint_;
};

}  // namespace nl2sql::llm
