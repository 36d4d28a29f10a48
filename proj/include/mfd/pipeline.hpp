#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/config.hpp"
#include "mfd/contrastive.hpp"
#include "mfd/embedding.hpp"
#include "mfd/llm.hpp"
#include "mfd/lowlevel.hpp"
#include "mfd/model.hpp"
#include "mfd/report.hpp"
#include "mfd/train.hpp"

namespace mfd {

struct PipelineOptions {
  std::optional<std::filesystem::path> cache_dir;  // embeddings/ and llm/ live below it
  std::shared_ptr<HttpTransport> transport;        // shared by both remote providers
};

// Owns the providers and turns documents into model inputs.
class Pipeline {
 public:
  explicit Pipeline(MfdConfig config, PipelineOptions options = {});

  const MfdConfig& config() const { return config_; }
  EmbeddingProvider& embedder() { return *embedder_; }
  LlmClient& llm() { return *llm_; }

  NormStats fit_norm(const std::vector<Document>& docs) const;
  PreparedDoc prepare(const Document& doc, const NormStats& norm);
  std::vector<PreparedDoc> prepare_all(const std::vector<Document>& docs, const NormStats& norm);

  // Provider ids, prompt template hashes, layout hash; embedded in every artifact.
  nlohmann::json provenance() const;

 private:
  MfdConfig config_;
  std::shared_ptr<CachedEmbedder> embedder_;
  std::unique_ptr<LlmClient> llm_;
};

Document segment_with_config(std::string_view raw, const MfdConfig& config, std::string id = "doc");

struct ModelBundle {
  std::unique_ptr<FusionModel> model;
  NormStats norm;
  MfdConfig config;
  nlohmann::json metadata = nlohmann::json::object();

  void save(const std::filesystem::path& path) const;
  // Refuses checkpoints whose feature layout differs from the running build.
  static ModelBundle load(const std::filesystem::path& path);
};

nlohmann::json bundle_metadata(const FusionModel& model, const NormStats& norm, const MfdConfig& config,
                               const nlohmann::json& provenance);

// Runs segmentation-free detection over an already segmented document.
DetectionReport detect(const ModelBundle& bundle, Pipeline& pipeline, const Document& doc);

// ---- experiments ----

struct ContrastiveStage {
  std::vector<Quadruple> quadruples;
  ContrastiveHistory history;
  ad::ParamStore head_params;  // "head.*"
};

// Builds quadruples from the given texts and trains a fresh projection head.
ContrastiveStage run_contrastive_stage(Pipeline& pipeline, const std::vector<std::string>& llm_texts,
                                       const std::vector<std::string>& human_texts);

// Sentences with any non-zero label become LLM texts, the rest human texts;
// both lists are truncated to the shorter one so they pair up by sample.
std::pair<std::vector<std::string>, std::vector<std::string>> contrastive_texts(const std::vector<Document>& docs);

struct PredictorStage {
  std::unique_ptr<FusionModel> model;
  NormStats norm;
  TrainResult train;
  std::vector<PreparedDoc> train_docs, val_docs;
};

// Second stage: copies the head into a fresh model, freezes it and trains the predictor.
PredictorStage run_predictor_stage(Pipeline& pipeline, const std::vector<Document>& train,
                                   const std::vector<Document>& val, const ad::ParamStore* head_params);

struct AblationRow {
  std::string variant;
  MetricReport test;
  std::size_t fused_width = 0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  MetricReport constant_baseline;  // every score 0.5
  nlohmann::json to_json() const;
  std::string to_markdown() const;
  std::string to_csv() const;
};

// Trains the full model and each single-block ablation on the same split and head.
AblationResult run_ablation(const MfdConfig& config, const DatasetSplit& split, const PipelineOptions& options);

}  // namespace mfd
