#include "nl2sql/app/runtime.hpp"

#include "nl2sql/common/error.hpp"
#include "nl2sql/llm/cassette.hpp"
#include "nl2sql/llm/http_provider.hpp"
#include "nl2sql/llm/scripted.hpp"

namespace nl2sql::app {

void RoutingProvider::add(const std::string& name, llm::ProviderPtr provider) {
  routes_.insert_or_assign(name, std::move(provider));
}

llm::Completion RoutingProvider::complete(const llm::ModelRef& model, std::string_view prompt) {
  auto it = routes_.find(model.provider_name);
  if (it == routes_.end())
    throw TransportError("no provider named '" + model.provider_name + "' is configured", /*retriable=*/false);
  return it->second->complete(model, prompt);
}

std::unique_ptr<retrieval::Embedder> make_embedder(const RetrievalConfig& config) {
  if (config.embedder == "hashing") return std::make_unique<retrieval::HashingEmbedder>(config.dim);
  if (config.embedder == "http") {
    retrieval::HttpEmbedderOptions options;
    options.base_url = config.embedding_base_url;
    options.model_id = config.embedding_model;
    options.dim = config.dim;
    options.api_key_env = config.embedding_api_key_env;
    return std::make_unique<retrieval::HttpEmbedder>(options);
  }
  throw ConfigError("unknown embedder '" + config.embedder + "' (expected hashing or http)");
}

Runtime make_runtime(const Config& config) {
  Runtime rt;
  rt.templates = std::make_shared<llm::TemplateRegistry>();
  if (!config.templates_dir.empty()) rt.templates->load_directory(config.templates_dir);

  auto router = std::make_shared<RoutingProvider>();
  for (const auto& [name, p] : config.providers) {
    if (p.kind == ProviderKind::scripted) {
      router->add(name, std::make_shared<llm::ScriptedProvider>(llm::ScriptedProvider::from_file(p.rules, name)));
    } else {
      llm::HttpProviderOptions options;
      options.base_url = p.base_url;
      options.api_key_env = p.api_key_env;
      options.timeout = std::chrono::milliseconds(p.timeout_ms);
      router->add(name, std::make_shared<llm::HttpProvider>(name, options));
    }
  }
  if (config.cassette.mode == llm::CassetteMode::passthrough) {
    rt.provider = router;
  } else {
    rt.provider = std::make_shared<llm::CassetteProvider>(config.cassette.mode, config.cassette.path, router);
  }
  rt.embedder = make_embedder(config.retrieval);
  return rt;
}

}  // namespace nl2sql::app
