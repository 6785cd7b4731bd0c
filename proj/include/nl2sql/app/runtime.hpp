#pragma once

#include <map>
#include <memory>
#include <string>

#include "nl2sql/app/config.hpp"
#include "nl2sql/llm/provider.hpp"
#include "nl2sql/llm/templates.hpp"
#include "nl2sql/retrieval/embedder.hpp"

namespace nl2sql::app {

/// Dispatches each call to the provider named by ModelRef::provider_name.
class RoutingProvider final : public llm::Provider {
 public:
  void add(const std::string& name, llm::ProviderPtr provider);
  llm::Completion complete(const llm::ModelRef& model, std::string_view prompt) override;
  std::string name() const override { return "router"; }

 private:
  std::map<std::string, llm::ProviderPtr, std::less<>> routes_;
};

/// Live objects built from a Config: one provider (routing, wrapped in the
/// configured cassette), the template registry and the embedder.
struct Runtime {
  llm::ProviderPtr provider;
  std::shared_ptr<llm::TemplateRegistry> templates;
  std::shared_ptr<retrieval::Embedder> embedder;
};

Runtime make_runtime(const Config& config);

std::unique_ptr<retrieval::Embedder> make_embedder(const RetrievalConfig& config);

}  // namespace nl2sql::app
