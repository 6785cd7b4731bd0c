#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nl2sql::retrieval {

struct EmbeddingVector {
  std::vector<double> values;  // finite, L2-normalized
  std::size_t dim() const noexcept { return values.size(); }
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  /// Throws ConfigError for empty text.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::size_t dim() const = 0;
  /// Identifies the vector space; an index only accepts queries embedded by
  /// an embedder with the same name.
  virtual std::string name() const = 0;
};

/// Feature-hashed character n-grams.
///
/// The text is ASCII-lowercased, whitespace runs collapse to one space, and
/// one space pads each end. Every byte n-gram with min_n <= n <= max_n adds
/// 1.0 to bucket fnv1a64(gram) % dim. The counts are L2-normalized.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dim = 512, std::size_t min_n = 3, std::size_t max_n = 5);

  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_; }
  std::string name() const override;

 private:
  std::size_t dim_;
  std::size_t min_n_;
  std::size_t max_n_;
};

struct HttpEmbedderOptions {
  std::string base_url;  // requests go to {base_url}/embeddings
  std::string model_id;
  std::size_t dim = 0;   // expected dimension
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{30000};
};

/// OpenAI-compatible embeddings endpoint; results are L2-normalized. Transport
/// failures raise TransportError.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderOptions options);

  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dim() const override { return options_.dim; }
  std::string name() const override { return "http:" + options_.model_id; }

 private:
  HttpEmbedderOptions options_;
};

/// Scales `values` to unit L2 norm. Throws ConfigError for zero or
/// non-finite vectors.
void normalize_in_place(std::vector<double>& values);

}  // namespace nl2sql::retrieval
