#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "nl2sql/llm/model.hpp"

namespace nl2sql::llm {

/// A model endpoint. Implementations must be safe to call concurrently.
class Provider {
 public:
  virtual ~Provider() = default;

  /// Returns the provider's text verbatim. Throws TransportError on transport
  /// failure and CassetteMissError on replay misses.
  virtual Completion complete(const ModelRef& model, std::string_view prompt) = 0;

  virtual std::string name() const = 0;
};

using ProviderPtr = std::shared_ptr<Provider>;

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds base_delay{200};
  double multiplier = 2.0;
};

/// complete() with retries on retriable TransportError, sleeping
/// base_delay * multiplier^attempt between tries. Rejects empty prompts.
Completion complete_with_retry(Provider& provider, const ModelRef& model, std::string_view prompt,
                               const RetryPolicy& policy = {});

}  // namespace nl2sql::llm
