#include "nl2sql/llm/provider.hpp"

#include <cmath>
#include <thread>

#include "nl2sql/common/error.hpp"

namespace nl2sql::llm {

Completion complete_with_retry(Provider& provider, const ModelRef& model, std::string_view prompt,
                               const RetryPolicy& policy) {
  if (prompt.empty()) throw ConfigError("prompt must be non-empty");
  for (int attempt = 0;; ++attempt) {
    try {
      return provider.complete(model, prompt);
    } catch (const TransportError& e) {
      if (!e.retriable() || attempt >= policy.max_retries) throw;
    }
    const double factor = std::pow(policy.multiplier, attempt);
    const auto delay = std::chrono::duration<double, std::milli>(policy.base_delay.count() * factor);
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
  }
}

}  // namespace nl2sql::llm
