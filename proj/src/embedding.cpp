#include "mfd/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mfd/error.hpp"
#include "mfd/hash.hpp"
#include "mfd/random.hpp"
#include "mfd/unicode.hpp"

namespace mfd {

std::string_view to_string(Pooling p) { return p == Pooling::mean ? "mean" : "cls_like"; }

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::mean;
  if (name == "cls_like") return Pooling::cls_like;
  throw ConfigError("embedding.pooling", "expected mean or cls_like, got '" + std::string(name) + "'");
}

namespace {

void add_feature(std::vector<double>& acc, std::string_view feature, std::uint64_t seed) {
  const std::uint64_t h = fnv1a64(feature) ^ splitmix64(seed);
  for (std::size_t j = 0; j < acc.size(); ++j) {
    const std::uint64_t bits = splitmix64(h + 0x632be59bd9b4e019ULL * (j + 1));
    acc[j] += (bits >> 63) ? 1.0 : -1.0;
  }
}

void add_string_features(std::vector<double>& acc, const std::vector<char32_t>& cps,
                         std::uint64_t seed) {
  std::vector<char32_t> padded;
  padded.reserve(cps.size() + 2);
  padded.push_back(U' ');
  padded.insert(padded.end(), cps.begin(), cps.end());
  padded.push_back(U' ');
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    add_feature(acc, "c:" + unicode::encode(std::vector<char32_t>(padded.begin() + i, padded.begin() + i + 3)), seed);
  }
}

void l2_normalize(std::vector<double>& v) {
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n == 0) {
    v.assign(v.size(), 0.0);
    v[0] = 1.0;
    return;
  }
  for (double& x : v) x /= n;
}

}  // namespace

std::vector<double> local_hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed,
                                     Pooling pooling) {
  if (dim < 8) throw PreconditionError("local hash embedding needs dim >= 8");
  const std::string lowered = unicode::to_lower(unicode::nfc(text));
  const auto cps = unicode::decode(lowered);
  std::vector<std::vector<char32_t>> words(1);
  for (char32_t c : cps) {
    if (unicode::is_space(c)) {
      if (!words.back().empty()) words.emplace_back();
    } else {
      words.back().push_back(c);
    }
  }
  if (words.back().empty()) words.pop_back();

  std::vector<double> out(dim, 0.0);
  if (pooling == Pooling::cls_like || words.empty()) {
    add_string_features(out, cps, seed);
    for (const auto& w : words) add_feature(out, "w:" + unicode::encode(w), seed);
    add_feature(out, "s:" + lowered, seed);
  } else {
    std::vector<double> word_vec(dim);
    for (const auto& w : words) {
      std::fill(word_vec.begin(), word_vec.end(), 0.0);
      add_string_features(word_vec, w, seed);
      add_feature(word_vec, "w:" + unicode::encode(w), seed);
      l2_normalize(word_vec);
      for (std::size_t j = 0; j < dim; ++j) out[j] += word_vec[j] / static_cast<double>(words.size());
    }
  }
  l2_normalize(out);
  return out;
}

LocalHashProvider::LocalHashProvider(std::size_t dim, std::uint64_t seed, Pooling pooling)
    : dim_(dim), seed_(seed), pooling_(pooling) {
  if (dim < 8) throw ConfigError("embedding.d_model", "must be >= 8");
}

std::string LocalHashProvider::id() const {
  return "local-hash-v1:d" + std::to_string(dim_) + ":seed" + std::to_string(seed_) + ":" +
         std::string(to_string(pooling_));
}

std::vector<Embedding> LocalHashProvider::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back({local_hash_embed(t, dim_, seed_, pooling_), id(), pooling_});
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config,
                                                 std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) transport_ = std::make_shared<HttplibTransport>();
  if (config_.url.empty()) throw ConfigError("embedding.url", "remote provider needs a URL");
}

std::vector<Embedding> RemoteEmbeddingProvider::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  HttpHeaders headers;
  if (const auto key = env_or_empty(config_.api_key_env); !key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + key);
  }
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const std::size_t end = std::min(texts.size(), start + config_.batch_size);
    nlohmann::json req = {{"model", config_.model},
                          {"input", std::vector<std::string>(texts.begin() + start, texts.begin() + end)}};
    const auto res = post_with_retries(*transport_, config_.retry, config_.url, req.dump(), headers);
    if (!res.ok) {
      throw ProviderError("embedding request failed: " + res.last_error, res.attempts,
                          res.last_backoff_ms);
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res.body);
    } catch (const std::exception& e) {
      throw ProviderError(std::string("malformed embedding response: ") + e.what(), res.attempts,
                          res.last_backoff_ms);
    }
    if (!body.contains("data") || !body["data"].is_array() || body["data"].size() != end - start) {
      throw ProviderError("embedding response has the wrong number of rows", res.attempts,
                          res.last_backoff_ms);
    }
    for (const auto& row : body["data"]) {
      auto v = row.at("embedding").get<std::vector<double>>();
      if (v.size() != config_.dim) {
        throw ProviderError("embedding dimension " + std::to_string(v.size()) + " != configured " +
                                std::to_string(config_.dim),
                            res.attempts, res.last_backoff_ms);
      }
      for (double x : v) {
        if (!std::isfinite(x)) throw ProviderError("non-finite embedding value", res.attempts, res.last_backoff_ms);
      }
      out.push_back({std::move(v), id(), pooling()});
    }
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string EmbeddingCache::key(std::string_view provider_id, std::string_view text) {
  std::string material;
  material.reserve(provider_id.size() + text.size() + 1);
  material.append(provider_id);
  material.push_back('\0');
  material.append(text);
  return sha256_hex(material);
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) {
      ++hits_;
      return it->second;
    }
  }
  if (dir_) {
    std::ifstream in(*dir_ / (key + ".json"));
    if (in) {
      try {
        auto v = nlohmann::json::parse(in).get<std::vector<double>>();
        std::lock_guard lock(mu_);
        memory_[key] = v;
        ++hits_;
        return v;
      } catch (const std::exception&) {
        // Corrupt entry: treated as a miss and overwritten.
      }
    }
  }
  ++misses_;
  return std::nullopt;
}

void EmbeddingCache::put(const std::string& key, const std::vector<double>& value) {
  std::lock_guard lock(mu_);
  memory_[key] = value;
  if (dir_) {
    const auto final_path = *dir_ / (key + ".json");
    const auto tmp = *dir_ / (key + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << nlohmann::json(value).dump();
    }
    std::filesystem::rename(tmp, final_path);
  }
}

CachedEmbedder::CachedEmbedder(std::shared_ptr<EmbeddingProvider> inner,
                               std::shared_ptr<EmbeddingCache> cache, std::size_t parallelism)
    : inner_(std::move(inner)), cache_(std::move(cache)), parallelism_(std::max<std::size_t>(1, parallelism)) {}

std::vector<Embedding> CachedEmbedder::embed(const std::vector<std::string>& texts) {
  const std::string pid = inner_->id();
  std::vector<Embedding> out(texts.size());
  std::vector<std::string> keys(texts.size());
  // Unique misses, in first-seen order.
  std::vector<std::size_t> miss_index;
  std::unordered_map<std::string, std::size_t> pending;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = EmbeddingCache::key(pid, texts[i]);
    if (pending.count(keys[i])) continue;
    if (auto hit = cache_->get(keys[i])) {
      out[i] = {std::move(*hit), pid, inner_->pooling()};
    } else {
      pending.emplace(keys[i], miss_index.size());
      miss_index.push_back(i);
    }
  }
  if (!miss_index.empty()) {
    const std::size_t workers = std::min(parallelism_, miss_index.size());
    std::vector<std::vector<Embedding>> results(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](std::size_t w) {
      try {
        std::vector<std::string> batch;
        for (std::size_t m = w; m < miss_index.size(); m += workers) batch.push_back(texts[miss_index[m]]);
        results[w] = inner_->embed(batch);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t m = 0; m < miss_index.size(); ++m) {
      const std::size_t i = miss_index[m];
      out[i] = std::move(results[m % workers][m / workers]);
      cache_->put(keys[i], out[i].vector);
    }
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (out[i].vector.empty()) {
      out[i] = out[miss_index[pending.at(keys[i])]];
    }
  }
  return out;
}

std::vector<Embedding> embed_document(const Document& doc, EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(doc.size());
  for (const auto& s : doc.sentences()) texts.push_back(s.text);
  auto out = provider.embed(texts);
  if (out.size() != texts.size()) throw ProviderError("provider returned the wrong number of embeddings", 1, 0);
  return out;
}

namespace {

bool ends_sentence(std::string_view word) {
  std::size_t end = word.size();
  while (end > 0 && std::string_view("\"')]").find(word[end - 1]) != std::string_view::npos) --end;
  if (end == 0) return false;
  const char last = word[end - 1];
  if (last != '.' && last != '!' && last != '?') return false;
  if (last == '.') {
    const std::string lower = unicode::to_lower(word.substr(0, end));
    for (const auto& guard : abbreviation_guard_list()) {
      const auto space = guard.rfind(' ');
      const std::string_view tail = space == std::string::npos ? std::string_view(guard)
                                                               : std::string_view(guard).substr(space + 1);
      if (lower == tail) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::string> chunk_text(std::string_view text, std::size_t max_chunk_tokens) {
  if (max_chunk_tokens < 16) throw PreconditionError("max_chunk_tokens must be >= 16");
  // Words with the offset where the next word starts (trailing whitespace stays attached).
  struct Word {
    std::size_t begin, end, next;
  };
  std::vector<Word> words;
  std::size_t i = 0;
  const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size() && is_ws(text[i])) ++i;
  while (i < text.size()) {
    const std::size_t b = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    const std::size_t e = i;
    while (i < text.size() && is_ws(text[i])) ++i;
    words.push_back({b, e, i});
  }
  if (words.empty()) throw DegenerateInput("analysis text is empty");

  // Sentences as [first word, last word].
  std::vector<std::pair<std::size_t, std::size_t>> sentences;
  std::size_t start = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto word = text.substr(words[w].begin, words[w].end - words[w].begin);
    if (ends_sentence(word) || w + 1 == words.size()) {
      sentences.emplace_back(start, w);
      start = w + 1;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> groups;  // word ranges [a, b)
  std::size_t cur_begin = 0, cur_count = 0;
  for (const auto& [a, b] : sentences) {
    const std::size_t n = b - a + 1;
    if (cur_count > 0 && cur_count + n > max_chunk_tokens) {
      groups.emplace_back(cur_begin, cur_begin + cur_count);
      cur_begin = a;
      cur_count = 0;
    }
    if (cur_count == 0) cur_begin = a;
    cur_count += n;
    while (cur_count > max_chunk_tokens) {
      groups.emplace_back(cur_begin, cur_begin + max_chunk_tokens);
      cur_begin += max_chunk_tokens;
      cur_count -= max_chunk_tokens;
    }
  }
  if (cur_count > 0) groups.emplace_back(cur_begin, cur_begin + cur_count);

  std::vector<std::string> chunks;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t from = g == 0 ? 0 : words[groups[g].first].begin;
    const std::size_t to = g + 1 == groups.size() ? text.size() : words[groups[g + 1].first].begin;
    chunks.emplace_back(text.substr(from, to - from));
  }
  return chunks;
}

ad::Tensor ChunkedEmbedding::matrix() const {
  if (rows.empty()) throw DegenerateInput("no chunk embeddings");
  const std::size_t d = rows.front().vector.size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const auto& r : rows) data.insert(data.end(), r.vector.begin(), r.vector.end());
  return ad::Tensor::matrix(rows.size(), d, std::move(data));
}

ChunkedEmbedding embed_text_chunked(std::string_view text, std::size_t max_chunk_tokens,
                                    EmbeddingProvider& provider) {
  ChunkedEmbedding out;
  out.chunks = chunk_text(text, max_chunk_tokens);
  out.rows = provider.embed(out.chunks);
  return out;
}

}  // namespace mfd
