#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mfd/corpus.hpp"
#include "mfd/http.hpp"
#include "mfd/tensor.hpp"

namespace mfd {

enum class Pooling { mean, cls_like };

std::string_view to_string(Pooling p);
Pooling parse_pooling(std::string_view name);

struct Embedding {
  std::vector<double> vector;
  std::string provider_id;
  Pooling pooling = Pooling::mean;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  // Stable identity; part of every cache key.
  virtual std::string id() const = 0;
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
  virtual Pooling pooling() const { return Pooling::mean; }
};

// Hashed character trigrams and word unigrams projected onto `dim` Rademacher
// directions derived from `seed`, then L2-normalized. Mean pooling averages
// per-word vectors; cls_like embeds the whole string at once.
std::vector<double> local_hash_embed(std::string_view text, std::size_t dim,
                                     std::uint64_t seed = 0, Pooling pooling = Pooling::mean);

class LocalHashProvider : public EmbeddingProvider {
 public:
  LocalHashProvider(std::size_t dim = 256, std::uint64_t seed = 0, Pooling pooling = Pooling::mean);
  std::size_t dimension() const override { return dim_; }
  std::string id() const override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  Pooling pooling() const override { return pooling_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  Pooling pooling_;
};

struct RemoteEmbeddingConfig {
  std::string url;  // full endpoint, e.g. https://host/v1/embeddings
  std::string model;
  std::string api_key_env = "MFD_EMBEDDING_API_KEY";
  std::size_t dim = 256;
  std::size_t batch_size = 32;
  RetryPolicy retry;
};

// OpenAI-style embeddings endpoint. Throws ProviderError once retries are exhausted.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(RemoteEmbeddingConfig config,
                          std::shared_ptr<HttpTransport> transport = nullptr);
  std::size_t dimension() const override { return config_.dim; }
  std::string id() const override { return "remote:" + config_.model + ":d" + std::to_string(config_.dim); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  RemoteEmbeddingConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

// Content-addressed store keyed by SHA-256(provider_id, text). Thread-safe.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::optional<std::filesystem::path> dir = std::nullopt);

  static std::string key(std::string_view provider_id, std::string_view text);
  std::optional<std::vector<double>> get(const std::string& key);
  void put(const std::string& key, const std::vector<double>& value);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> memory_;
  std::atomic<std::size_t> hits_{0}, misses_{0};
};

// Serves repeated texts from the cache and fans misses out over at most
// `parallelism` concurrent provider calls. Output order matches input order.
class CachedEmbedder : public EmbeddingProvider {
 public:
  CachedEmbedder(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<EmbeddingCache> cache,
                 std::size_t parallelism = 4);
  std::size_t dimension() const override { return inner_->dimension(); }
  std::string id() const override { return inner_->id(); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  Pooling pooling() const override { return inner_->pooling(); }
  EmbeddingCache& cache() { return *cache_; }

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  std::shared_ptr<EmbeddingCache> cache_;
  std::size_t parallelism_;
};

// One embedding per sentence, in order.
std::vector<Embedding> embed_document(const Document& doc, EmbeddingProvider& provider);

struct ChunkedEmbedding {
  std::vector<std::string> chunks;  // contiguous substrings; concatenation == input
  std::vector<Embedding> rows;
  ad::Tensor matrix() const;  // [chunks, dim]
};

// Splits at sentence ends (and at word boundaries inside over-long sentences) so
// every chunk holds at most `max_chunk_tokens` whitespace tokens.
std::vector<std::string> chunk_text(std::string_view text, std::size_t max_chunk_tokens);
ChunkedEmbedding embed_text_chunked(std::string_view text, std::size_t max_chunk_tokens,
                                    EmbeddingProvider& provider);

}  // namespace mfd
