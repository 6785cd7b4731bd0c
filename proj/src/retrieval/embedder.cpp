#include "nl2sql/retrieval/embedder.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/hash.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/llm/http_provider.hpp"
#include "nl2sql/simd/kernels.hpp"

namespace nl2sql::retrieval {

void normalize_in_place(std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("embedding contains non-finite values");
  }
  const double norm = simd::l2_norm(values);
  if (!(norm > 0.0)) throw ConfigError("cannot normalize a zero embedding");
  simd::scale(values, 1.0 / norm);
}

HashingEmbedder::HashingEmbedder(std::size_t dim, std::size_t min_n, std::size_t max_n)
    : dim_(dim), min_n_(min_n), max_n_(max_n) {
  if (dim_ == 0 || min_n_ == 0 || max_n_ < min_n_) throw ConfigError("invalid hashing embedder parameters");
}

std::string HashingEmbedder::name() const {
  return "hashing-ngram" + std::to_string(min_n_) + "-" + std::to_string(max_n_) + "-d" + std::to_string(dim_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view input) const {
  const std::string collapsed = text::collapse_whitespace(text::to_lower(input));
  if (collapsed.empty()) throw ConfigError("cannot embed empty text");
  const std::string padded = " " + collapsed + " ";
  const std::string_view view(padded);

  EmbeddingVector out;
  out.values.assign(dim_, 0.0);
  for (std::size_t n = min_n_; n <= max_n_; ++n) {
    for (std::size_t i = 0; i + n <= view.size(); ++i) {
      out.values[fnv1a64(view.substr(i, n)) % dim_] += 1.0;
    }
  }
  normalize_in_place(out.values);
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options) : options_(std::move(options)) {
  llm::split_base_url(options_.base_url);  // validates
  if (options_.dim == 0) throw ConfigError("http embedder needs a positive dim");
}

EmbeddingVector HttpEmbedder::embed(std::string_view input) const {
  if (text::trim(input).empty()) throw ConfigError("cannot embed empty text");
  const llm::ParsedUrl url = llm::split_base_url(options_.base_url);
  httplib::Client client(url.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);

  httplib::Headers headers;
  if (const char* key = options_.api_key_env.empty() ? nullptr : std::getenv(options_.api_key_env.c_str());
      key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body = {{"model", options_.model_id}, {"input", input}};
  auto res = client.Post(url.path + "/embeddings", headers, jsonl::dump(body), "application/json");
  if (!res) throw TransportError("embedder request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("embedder HTTP " + std::to_string(res->status), res->status == 429 || res->status >= 500);
  }
  EmbeddingVector out;
  try {
    auto doc = nlohmann::json::parse(res->body);
    out.values = doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("embedder returned a malformed response: ") + e.what(), false);
  }
  if (out.values.size() != options_.dim) {
    throw TransportError("embedder returned dim " + std::to_string(out.values.size()) + ", expected " +
                             std::to_string(options_.dim),
                         false);
  }
  normalize_in_place(out.values);
  return out;
}

}  // namespace nl2sql::retrieval
