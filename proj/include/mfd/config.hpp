#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfd {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t epochs = 30;
  std::size_t batch_train = 512;
  std::size_t batch_val = 64;
  std::size_t step_size = 5;
  double gamma = 0.5;
  double beta = 0.5;
  std::size_t heads = 8;
  double alpha = 0.3;
  std::uint64_t seed = 42;
};

struct ModelConfig {
  std::size_t d_proj = 128;
  std::size_t d_ff = 0;  // 0 -> 4 * d_model
  std::size_t main_hidden = 128;
  std::size_t eval_hidden = 64;
  std::string fusion = "vector";  // vector | scalar
  bool use_low = true;
  bool use_high = true;
  bool use_deep = true;
  bool cross_projections = false;
  bool normalize_qk = false;
  std::size_t max_chunk_tokens = 64;
};

struct ContrastiveSection {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t step_size = 5;
  double gamma = 0.5;
};

struct EmbeddingSection {
  std::string provider = "local";  // local | remote
  std::size_t d_model = 256;
  std::string pooling = "mean";
  std::uint64_t seed = 0;
  std::string url;
  std::string model = "text-embedding-3-small";
  std::string api_key_env = "MFD_EMBEDDING_API_KEY";
  std::size_t parallelism = 4;
  std::size_t batch_size = 32;
};

struct LlmSection {
  bool offline = true;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "MFD_LLM_API_KEY";
  double temperature_generation = 0.7;
  double temperature_analysis = 0.0;
  double offline_intensity = 0.6;
  std::string prompts;  // path to a template file; empty -> built-in templates
  int max_attempts = 3;
  double base_backoff_ms = 250.0;
};

struct ReportSection {
  double floor = 0.05;
  std::vector<double> bands = {0.25, 0.5, 0.75};  // upper edges of low, medium, high
};

struct DataSection {
  std::string segment_mode = "delimiter";
  std::string label_format = "regression";
};

struct MfdConfig {
  TrainConfig train;
  ModelConfig model;
  ContrastiveSection contrastive;
  EmbeddingSection embedding;
  LlmSection llm;
  ReportSection report;
  DataSection data;

  // Missing fields keep their defaults; unknown fields and invalid values
  // raise ConfigError naming the dotted field path.
  static MfdConfig from_json(const nlohmann::json& j);
  static MfdConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // SHA-256 of the canonical JSON form.
  std::string hash() const;
  void validate() const;
};

}  // namespace mfd
