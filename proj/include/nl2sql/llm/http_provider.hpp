#pragma once

#include <chrono>
#include <string>

#include "nl2sql/llm/provider.hpp"

namespace nl2sql::llm {

struct HttpProviderOptions {
  /// e.g. "http://localhost:8000/v1"; requests go to {base_url}/chat/completions.
  std::string base_url;
  /// Environment variable holding the bearer token; empty means no auth header.
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60000};
};

/// OpenAI-compatible chat-completions client. The request body is
/// {model, messages: [{role: "user", content: prompt}], temperature, max_tokens}.
class HttpProvider final : public Provider {
 public:
  HttpProvider(std::string name, HttpProviderOptions options);

  Completion complete(const ModelRef& model, std::string_view prompt) override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  HttpProviderOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

struct ParsedUrl {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1" or ""
};

/// Splits a base URL; throws ConfigError for anything but http(s)://host[:port][/path].
ParsedUrl split_base_url(const std::string& url);

}  // namespace nl2sql::llm
