#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace nl2sql::llm {

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 1024;
};

/// Opaque handle to a model behind a provider. Weights never live here.
struct ModelRef {
  std::string provider_name;
  std::string model_id;
  DecodingParams params;

  /// Throws ConfigError when temperature < 0 or max_tokens < 1.
  void validate() const;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Completion {
  std::string text;  // exact provider output
  std::optional<Usage> usage;
  std::int64_t latency_ms = 0;
};

}  // namespace nl2sql::llm
