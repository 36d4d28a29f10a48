#include "mfd/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd {

using ad::Tensor;
using nlohmann::json;

namespace {

std::optional<std::filesystem::path> subdir(const std::optional<std::filesystem::path>& root, const char* name) {
  if (!root) return std::nullopt;
  return *root / name;
}

RetryPolicy retry_from(const LlmSection& s) {
  RetryPolicy r;
  r.max_attempts = s.max_attempts;
  r.base_backoff_ms = s.base_backoff_ms;
  return r;
}

std::vector<std::string> texts_of(const Document& doc) {
  std::vector<std::string> out;
  for (const auto& s : doc.sentences()) out.push_back(s.text);
  return out;
}

Tensor stack_embeddings(const std::vector<Embedding>& rows, std::size_t dim) {
  std::vector<double> data;
  data.reserve(rows.size() * dim);
  for (const auto& e : rows) data.insert(data.end(), e.vector.begin(), e.vector.end());
  return Tensor::matrix(rows.size(), dim, std::move(data));
}

}  // namespace

Pipeline::Pipeline(MfdConfig config, PipelineOptions options) : config_(std::move(config)) {
  const auto& e = config_.embedding;
  std::shared_ptr<EmbeddingProvider> inner;
  if (e.provider == "remote") {
    RemoteEmbeddingConfig rc;
    rc.url = e.url;
    rc.model = e.model;
    rc.api_key_env = e.api_key_env;
    rc.dim = e.d_model;
    rc.batch_size = e.batch_size;
    rc.retry = retry_from(config_.llm);
    inner = std::make_shared<RemoteEmbeddingProvider>(rc, options.transport);
  } else {
    inner = std::make_shared<LocalHashProvider>(e.d_model, e.seed, parse_pooling(e.pooling));
  }
  embedder_ = std::make_shared<CachedEmbedder>(
      inner, std::make_shared<EmbeddingCache>(subdir(options.cache_dir, "embeddings")), e.parallelism);

  const auto& l = config_.llm;
  LlmConfig lc;
  lc.offline = l.offline;
  lc.base_url = l.base_url;
  lc.model = l.model;
  lc.api_key_env = l.api_key_env;
  lc.temperature_generation = l.temperature_generation;
  lc.temperature_analysis = l.temperature_analysis;
  lc.offline_intensity = l.offline_intensity;
  lc.seed = config_.train.seed;
  lc.retry = retry_from(l);
  PromptLibrary prompts = l.prompts.empty() ? PromptLibrary::defaults() : PromptLibrary::load(l.prompts);
  llm_ = std::make_unique<LlmClient>(lc, std::move(prompts),
                                     std::make_shared<ResponseCache>(subdir(options.cache_dir, "llm")),
                                     options.transport);
}

NormStats Pipeline::fit_norm(const std::vector<Document>& docs) const {
  std::vector<std::string> texts;
  for (const auto& d : docs) {
    for (const auto& s : d.sentences()) texts.push_back(s.text);
  }
  if (texts.empty()) throw DatasetError("cannot fit normalization statistics on an empty set");
  const auto raw = extract_lowlevel_batch(texts);
  return NormStats::fit(raw);
}

PreparedDoc Pipeline::prepare(const Document& doc, const NormStats& norm) {
  if (doc.size() == 0) throw EmptyDocument("document " + doc.id() + " has no sentences");
  PreparedDoc p;
  p.id = doc.id();
  const auto texts = texts_of(doc);
  const std::size_t dim = embedder_->dimension();
  p.inputs.sentences = stack_embeddings(embedder_->embed(texts), dim);

  const auto raw = extract_lowlevel_batch(texts);
  std::vector<double> low;
  for (const auto& r : raw) {
    const auto v = normalize(r, norm).values;
    low.insert(low.end(), v.begin(), v.end());
  }
  p.inputs.low = Tensor::matrix(texts.size(), lowlevel_layout().width(), std::move(low));

  if (config_.model.use_deep) {
    const LlmResponse analysis = llm_->analyze_text(doc.plain_text());
    p.inputs.analysis = embed_text_chunked(analysis.text, config_.model.max_chunk_tokens, *embedder_).matrix();
  }
  if (doc.labeled()) {
    for (const auto& s : doc.sentences()) p.labels.push_back(*s.labels);
  }
  return p;
}

std::vector<PreparedDoc> Pipeline::prepare_all(const std::vector<Document>& docs, const NormStats& norm) {
  std::vector<PreparedDoc> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(prepare(d, norm));
  return out;
}

json Pipeline::provenance() const {
  return {{"embedding_provider", embedder_->id()},
          {"llm_model", llm_->model_id()},
          {"template_hashes", llm_->prompts().hashes()},
          {"layout_hash", lowlevel_layout().hash()},
          {"layout_width", lowlevel_layout().width()}};
}

Document segment_with_config(std::string_view raw, const MfdConfig& config, std::string id) {
  return segment_document(raw, parse_segment_mode(config.data.segment_mode), std::move(id));
}

json bundle_metadata(const FusionModel& model, const NormStats& norm, const MfdConfig& config,
                     const json& provenance) {
  json m = provenance;
  m["format"] = "mfd-model-v1";
  m["dims"] = model.dims().to_json();
  m["norm_stats"] = norm.to_json();
  m["config"] = config.to_json();
  m["config_hash"] = config.hash();
  m["seed"] = config.train.seed;
  return m;
}

void ModelBundle::save(const std::filesystem::path& path) const {
  if (!model) throw ModelNotLoaded("bundle has no model");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  ad::save_checkpoint(path, model->params(), metadata, false);
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ModelNotLoaded("model checkpoint " + path.string() + " not found");
  ad::Checkpoint ck = ad::load_checkpoint(path);
  const json& m = ck.metadata;
  if (m.value("format", "") != "mfd-model-v1") throw CheckpointError(path.string() + " is not a model bundle");
  if (m.value("layout_hash", "") != lowlevel_layout().hash()) {
    throw StatsMismatch("checkpoint feature layout " + m.value("layout_hash", "?") +
                        " differs from this build's " + lowlevel_layout().hash());
  }
  ModelBundle b;
  try {
    b.norm = NormStats::from_json(m.at("norm_stats"));
    b.config = MfdConfig::from_json(m.at("config"));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bundle metadata: ") + e.what());
  }
  const ModelDims dims = ModelDims::from_json(m.at("dims"));
  b.model = std::make_unique<FusionModel>(FusionModel::from_params(dims, std::move(ck.params)));
  b.metadata = m;
  return b;
}

DetectionReport detect(const ModelBundle& bundle, Pipeline& pipeline, const Document& doc) {
  const PreparedDoc p = pipeline.prepare(doc, bundle.norm);
  const auto scores = predict_sentences(bundle.model.get(), p.inputs);
  json meta = pipeline.provenance();
  meta["config_hash"] = bundle.metadata.value("config_hash", "");
  meta["seed"] = bundle.metadata.value("seed", 0);
  meta["offline"] = pipeline.config().llm.offline;
  return build_report(doc, scores, pipeline.config().report, std::move(meta));
}

// ---- experiments ----

std::pair<std::vector<std::string>, std::vector<std::string>> contrastive_texts(const std::vector<Document>& docs) {
  std::vector<std::string> llm, human;
  for (const auto& d : docs) {
    for (const auto& s : d.sentences()) {
      if (!s.labels) continue;
      if (s.labels->lex > 0 || s.labels->gram > 0 || s.labels->syn > 0) llm.push_back(s.text);
      else human.push_back(s.text);
    }
  }
  const std::size_t n = std::min(llm.size(), human.size());
  llm.resize(n);
  human.resize(n);
  return {std::move(llm), std::move(human)};
}

ContrastiveStage run_contrastive_stage(Pipeline& pipeline, const std::vector<std::string>& llm_texts,
                                       const std::vector<std::string>& human_texts) {
  const MfdConfig& c = pipeline.config();
  ContrastiveStage stage;
  stage.quadruples = build_quadruples(llm_texts, human_texts, pipeline.llm(), c.train.seed);
  const auto emb = embed_quadruples(stage.quadruples, pipeline.embedder());
  Rng rng(c.train.seed ^ 0x68656164ULL);
  const ProjectionHead head = ProjectionHead::create(stage.head_params, c.embedding.d_model, c.model.d_proj, rng);
  ContrastiveConfig cc;
  cc.alpha = c.train.alpha;
  cc.epochs = c.contrastive.epochs;
  cc.batch_size = c.contrastive.batch_size;
  cc.lr = c.contrastive.lr;
  cc.weight_decay = c.contrastive.weight_decay;
  cc.step_size = c.contrastive.step_size;
  cc.gamma = c.contrastive.gamma;
  cc.seed = c.train.seed;
  stage.history = train_contrastive(emb, head, stage.head_params, cc);
  return stage;
}

PredictorStage run_predictor_stage(Pipeline& pipeline, const std::vector<Document>& train,
                                   const std::vector<Document>& val, const ad::ParamStore* head_params) {
  const MfdConfig& c = pipeline.config();
  PredictorStage s;
  s.norm = pipeline.fit_norm(train);
  s.train_docs = pipeline.prepare_all(train, s.norm);
  s.val_docs = pipeline.prepare_all(val, s.norm);
  const ModelDims dims = ModelDims::from_config(c, lowlevel_layout().width());
  s.model = std::make_unique<FusionModel>(FusionModel::create(dims, c.train.seed));
  if (head_params && dims.use_high) {
    for (const auto& [path, t] : s.model->params().entries()) {
      if (path.rfind("head.", 0) != 0) continue;
      if (!head_params->contains(path)) throw CheckpointError("head checkpoint is missing " + path);
      const auto& src = head_params->get(path);
      if (src.shape() != t.shape()) throw CheckpointError("head parameter " + path + " has the wrong shape");
      auto dst = s.model->params().get(path).mutable_data();
      std::copy(src.data().begin(), src.data().end(), dst.begin());
    }
  }
  s.train = train_predictor(*s.model, s.train_docs, s.val_docs, c.train);
  return s;
}

json AblationResult::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"variant", r.variant}, {"fused_width", r.fused_width}, {"test", r.test.to_json()}});
  }
  return {{"rows", std::move(rows_j)}, {"constant_baseline", constant_baseline.to_json()}};
}

std::string AblationResult::to_markdown() const {
  std::ostringstream o;
  o << "| variant | width | MAE | MSE | RMSE | accuracy |\n|---|---:|---:|---:|---:|---:|\n";
  char buf[200];
  auto line = [&](const std::string& name, std::size_t width, const MetricReport& m) {
    std::snprintf(buf, sizeof buf, "| %s | %zu | %.4f | %.4f | %.4f | %.4f |\n", name.c_str(), width, m.mean.mae,
                  m.mean.mse, m.mean.rmse, m.mean.accuracy);
    o << buf;
  };
  for (const auto& r : rows) line(r.variant, r.fused_width, r.test);
  line("constant 0.5", 0, constant_baseline);
  return o.str();
}

std::string AblationResult::to_csv() const {
  std::ostringstream o;
  o << "variant,fused_width,mae,mse,rmse,accuracy\n";
  char buf[200];
  auto line = [&](const std::string& name, std::size_t width, const MetricReport& m) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g\n", name.c_str(), width, m.mean.mae, m.mean.mse,
                  m.mean.rmse, m.mean.accuracy);
    o << buf;
  };
  for (const auto& r : rows) line(r.variant, r.fused_width, r.test);
  line("constant_0.5", 0, constant_baseline);
  return o.str();
}

AblationResult run_ablation(const MfdConfig& config, const DatasetSplit& split, const PipelineOptions& options) {
  Pipeline base(config, options);
  const auto [llm_texts, human_texts] = contrastive_texts(split.train);
  const ContrastiveStage head = run_contrastive_stage(base, llm_texts, human_texts);

  AblationResult result;
  const auto test_labels = collect_labels(split.test);
  result.constant_baseline =
      regression_metrics(std::vector<InvolvementScores>(test_labels.size(), {0.5, 0.5, 0.5}), test_labels);

  const std::vector<std::pair<std::string, std::array<bool, 3>>> variants = {
      {"full", {true, true, true}},
      {"no_low", {false, true, true}},
      {"no_high", {true, false, true}},
      {"no_deep", {true, true, false}},
  };
  for (const auto& [name, on] : variants) {
    MfdConfig c = config;
    c.model.use_low = on[0];
    c.model.use_high = on[1];
    c.model.use_deep = on[2];
    Pipeline p(c, options);
    PredictorStage stage = run_predictor_stage(p, split.train, split.val, &head.head_params);
    const auto test_docs = p.prepare_all(split.test, stage.norm);
    AblationRow row;
    row.variant = name;
    row.fused_width = stage.model->dims().fused_width();
    row.test = regression_metrics(predict_all(*stage.model, test_docs), labels_of(test_docs));
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace mfd
