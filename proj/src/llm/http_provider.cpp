#include "nl2sql/llm/http_provider.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"

namespace nl2sql::llm {

ParsedUrl split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base URL must start with http:// or https://: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  if (out.scheme_host_port.size() <= scheme_end + 3) throw ConfigError("base URL has no host: " + url);
  if (path_start != std::string::npos) out.path = url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

HttpProvider::HttpProvider(std::string name, HttpProviderOptions options)
    : name_(std::move(name)), options_(std::move(options)) {
  ParsedUrl parsed = split_base_url(options_.base_url);
  scheme_host_port_ = std::move(parsed.scheme_host_port);
  path_prefix_ = std::move(parsed.path);
}

Completion HttpProvider::complete(const ModelRef& model, std::string_view prompt) {
  nlohmann::json body = {
      {"model", model.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", model.params.temperature},
      {"max_tokens", model.params.max_tokens},
  };

  httplib::Headers headers;
  if (!options_.api_key_env.empty()) {
    if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  // Clients are cheap; one per call keeps the provider safe to share.
  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, jsonl::dump(body), "application/json");
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

  if (!res) {
    throw TransportError("provider '" + name_ + "': request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    const bool retriable = res->status == 429 || res->status >= 500;
    throw TransportError("provider '" + name_ + "': HTTP " + std::to_string(res->status), retriable);
  }

  Completion out;
  out.latency_ms = latency.count();
  try {
    auto doc = nlohmann::json::parse(res->body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    out.text = content.is_null() ? std::string() : content.get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      Usage usage;
      usage.prompt_tokens = doc["usage"].value("prompt_tokens", std::int64_t{0});
      usage.completion_tokens = doc["usage"].value("completion_tokens", std::int64_t{0});
      out.usage = usage;
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("provider '" + name_ + "': malformed response: " + e.what(), false);
  }
  return out;
}

}  // namespace nl2sql::llm
