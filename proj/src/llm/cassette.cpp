#include "nl2sql/llm/cassette.hpp"

#include <fstream>

#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/hash.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"

namespace nl2sql::llm {

CassetteMode parse_cassette_mode(std::string_view name) {
  if (name == "record") return CassetteMode::record;
  if (name == "replay") return CassetteMode::replay;
  if (name == "passthrough") return CassetteMode::passthrough;
  throw ConfigError("unknown cassette mode '" + std::string(name) + "' (expected record, replay or passthrough)");
}

std::string fingerprint(const ModelRef& model, std::string_view prompt) {
  // nlohmann::json objects serialize with sorted keys.
  nlohmann::json canonical = {
      {"model_id", model.model_id},
      {"prompt", prompt},
      {"temperature", model.params.temperature},
      {"max_tokens", model.params.max_tokens},
  };
  return sha256_hex(jsonl::dump(canonical));
}

CassetteProvider::CassetteProvider(std::vector<CassetteEntry> entries)
    : mode_(CassetteMode::replay), entries_(std::move(entries)) {
  index_entries();
}

CassetteProvider::CassetteProvider(CassetteMode mode, std::filesystem::path path, ProviderPtr inner)
    : mode_(mode), path_(std::move(path)), inner_(std::move(inner)) {
  if (mode_ == CassetteMode::replay) {
    entries_ = load(path_);
  } else if (mode_ == CassetteMode::record && std::filesystem::exists(path_)) {
    entries_ = load(path_);
  }
  if (mode_ != CassetteMode::replay && !inner_) {
    throw ConfigError("cassette in record/passthrough mode needs an inner provider");
  }
  index_entries();
}

void CassetteProvider::index_entries() {
  for (std::size_t i = 0; i < entries_.size(); ++i) by_fingerprint_.emplace(entries_[i].fingerprint, i);
}

std::vector<CassetteEntry> CassetteProvider::parse(std::string_view jsonl_text) {
  std::vector<CassetteEntry> out;
  std::size_t number = 0;
  for (std::string_view line : text::split_lines(jsonl_text)) {
    ++number;
    if (text::trim(line).empty()) continue;
    try {
      auto row = nlohmann::json::parse(line);
      out.push_back({row.at("fingerprint").get<std::string>(), row.at("response_text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cassette line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CassetteEntry> CassetteProvider::load(const std::filesystem::path& path) {
  return parse(jsonl::read_file(path));
}

Completion CassetteProvider::complete(const ModelRef& model, std::string_view prompt) {
  if (mode_ == CassetteMode::passthrough) return inner_->complete(model, prompt);

  const std::string fp = fingerprint(model, prompt);
  if (mode_ == CassetteMode::replay) {
    auto it = by_fingerprint_.find(fp);
    if (it == by_fingerprint_.end()) throw CassetteMissError(fp);
    return Completion{entries_[it->second].response_text, {}, 0};
  }

  {
    std::lock_guard lock(mu_);
    if (auto it = by_fingerprint_.find(fp); it != by_fingerprint_.end()) {
      return Completion{entries_[it->second].response_text, {}, 0};
    }
  }
  Completion completion = inner_->complete(model, prompt);
  std::lock_guard lock(mu_);
  if (by_fingerprint_.find(fp) == by_fingerprint_.end()) {
    entries_.push_back({fp, completion.text});
    by_fingerprint_.emplace(fp, entries_.size() - 1);
    if (!path_.empty()) {
      if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
      std::ofstream out(path_, std::ios::binary | std::ios::app);
      if (!out) throw IoError("cannot append to cassette: " + path_.string());
      out << jsonl::dump({{"fingerprint", fp}, {"response_text", completion.text}}) << '\n';
    }
  }
  return completion;
}

std::vector<CassetteEntry> CassetteProvider::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

}  // namespace nl2sql::llm
