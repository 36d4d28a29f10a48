#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "mfd/http.hpp"

namespace mfd {

enum class PromptId { human_like, rewrite, linguistic_analysis };

std::string_view to_string(PromptId id);
PromptId parse_prompt_id(std::string_view name);

struct PromptTemplate {
  PromptId id = PromptId::rewrite;
  std::string version;  // semver
  std::string text;     // named placeholders in braces, e.g. {text}

  // SHA-256 over id, version and text.
  std::string hash() const;
  // Every placeholder must be bound and every binding used (ConfigError otherwise).
  std::string render(const std::map<std::string, std::string>& values) const;
};

class PromptLibrary {
 public:
  static PromptLibrary defaults();
  // {"templates": [{"id", "version", "template"}]}; ids not listed keep their defaults.
  static PromptLibrary from_json(const nlohmann::json& j);
  static PromptLibrary load(const std::filesystem::path& path);

  const PromptTemplate& get(PromptId id) const;
  // id -> content hash, recorded in every experiment artifact.
  nlohmann::json hashes() const;

 private:
  std::map<PromptId, PromptTemplate> templates_;
};

struct LlmUsage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

struct LlmResponse {
  std::string text;
  std::string model_id;
  LlmUsage usage;
  bool cached = false;
};

struct VariantPair {
  LlmResponse human_like;
  LlmResponse rewritten;
};

// On-disk/in-memory response store keyed by (template hash, model, temperature, input).
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);
  std::optional<LlmResponse> get(const std::string& key);
  void put(const std::string& key, const LlmResponse& response);

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::unordered_map<std::string, LlmResponse> memory_;
};

struct LlmConfig {
  bool offline = true;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "MFD_LLM_API_KEY";
  double temperature_generation = 0.7;
  double temperature_analysis = 0.0;
  // Edit probability used by the offline paraphraser.
  double offline_intensity = 0.6;
  std::uint64_t seed = 42;
  RetryPolicy retry;
};

inline constexpr std::string_view kOfflineModelId = "offline-rules-v1";

class LlmClient {
 public:
  LlmClient(LlmConfig config, PromptLibrary prompts, std::shared_ptr<ResponseCache> cache = nullptr,
            std::shared_ptr<HttpTransport> transport = nullptr);

  // Human-like rewrite and paraphrase of an LLM-written text.
  VariantPair generate_variants(std::string_view t_llm);
  // Free-text analysis of lexicon, grammar and syntax of the whole document.
  LlmResponse analyze_text(std::string_view full_text);

  const PromptLibrary& prompts() const { return prompts_; }
  const std::string& model_id() const { return model_id_; }
  std::size_t network_requests() const { return network_requests_; }

 private:
  LlmResponse complete(PromptId id, std::string_view input, double temperature);
  LlmResponse complete_offline(PromptId id, std::string_view input);
  LlmResponse complete_remote(const std::string& prompt, double temperature);

  LlmConfig config_;
  PromptLibrary prompts_;
  std::shared_ptr<ResponseCache> cache_;
  std::shared_ptr<HttpTransport> transport_;
  std::string model_id_;
  std::atomic<std::size_t> network_requests_{0};
};

// Deterministic structured summary of lexicon, grammar and syntax built from
// the low-level feature extractors; the offline stand-in for the analysis call.
std::string offline_analysis(std::string_view full_text);

}  // namespace mfd
