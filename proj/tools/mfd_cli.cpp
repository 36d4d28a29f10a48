#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfd/error.hpp"
#include "mfd/eval.hpp"
#include "mfd/lowlevel.hpp"
#include "mfd/pipeline.hpp"
#include "mfd/report.hpp"
#include "mfd/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mfd;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  bool offline = false;
  std::string provider_url;
  std::optional<double> threshold;
};

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::data: return 3;
    case ErrorCategory::provider: return 4;
    case ErrorCategory::internal: return 5;
  }
  return 5;
}

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::data: return "data";
    case ErrorCategory::provider: return "provider";
    case ErrorCategory::internal: return "internal";
  }
  return "internal";
}

int report_error(const std::string& type, std::string_view category, const std::string& message, int code,
                 const json& extra = json::object()) {
  json e = {{"type", type}, {"category", category}, {"message", message}, {"exit_code", code}};
  e.update(extra);
  std::cerr << json{{"error", e}}.dump() << "\n";
  return code;
}

MfdConfig resolve_config(const Globals& g) {
  MfdConfig c = g.config_path.empty() ? MfdConfig{} : MfdConfig::load(g.config_path);
  if (g.seed) c.train.seed = *g.seed;
  if (!g.provider_url.empty()) {
    c.llm.base_url = g.provider_url;
    c.llm.offline = false;
  }
  if (g.offline) {
    c.llm.offline = true;
    c.embedding.provider = "local";
  }
  c.validate();
  return c;
}

PipelineOptions pipeline_options(const Globals& g) {
  PipelineOptions o;
  if (!g.cache_dir.empty()) {
    o.cache_dir = g.cache_dir;
  } else if (const char* env = std::getenv("MFD_CACHE_DIR"); env && *env) {
    o.cache_dir = env;
  }
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  out << text;
}

// Writes to the path, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open input " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LabelFormat label_format(const MfdConfig& c) { return parse_label_format(c.data.label_format); }

json artifact_stamp(const MfdConfig& c) { return {{"config_hash", c.hash()}, {"seed", c.train.seed}}; }

// ---- subcommands ----

int cmd_detect(const Globals& g, const std::string& model, const std::string& input, const std::string& format,
               const std::string& output, const std::string& html, const std::string& segment) {
  ModelBundle bundle = ModelBundle::load(model);
  MfdConfig c = bundle.config;
  // Runtime flags override the training-time provider and report settings.
  if (!g.config_path.empty()) {
    const MfdConfig user = MfdConfig::load(g.config_path);
    c.llm = user.llm;
    c.report = user.report;
    c.data = user.data;
  }
  if (!g.provider_url.empty()) {
    c.llm.base_url = g.provider_url;
    c.llm.offline = false;
  }
  if (g.offline) c.llm.offline = true;
  if (!segment.empty()) c.data.segment_mode = segment;
  if (g.threshold) c.report.floor = *g.threshold;
  c.validate();

  Pipeline pipeline(c, pipeline_options(g));
  const std::string id = input.empty() || input == "-" ? "stdin" : fs::path(input).stem().string();
  const Document doc = segment_with_config(read_input(input), c, id);
  const DetectionReport report = detect(bundle, pipeline, doc);
  if (format == "html") {
    emit(output, render_html(report));
  } else {
    emit(output, report.to_json().dump(2) + "\n");
  }
  if (!html.empty()) write_text(html, render_html(report));
  return 0;
}

int cmd_train_contrastive(const Globals& g, const std::string& dataset, const std::string& output,
                          const std::string& quads_out) {
  const MfdConfig c = resolve_config(g);
  Pipeline pipeline(c, pipeline_options(g));
  const auto docs = load_labeled_dataset(dataset, label_format(c));
  const auto [llm_texts, human_texts] = contrastive_texts(docs);
  const ContrastiveStage stage = run_contrastive_stage(pipeline, llm_texts, human_texts);
  json meta = pipeline.provenance();
  meta.update(artifact_stamp(c));
  meta["format"] = "mfd-head-v1";
  meta["config"] = c.to_json();
  meta["history"] = {{"initial_loss", stage.history.initial_loss}, {"epoch_loss", stage.history.epoch_loss}};
  meta["quadruples"] = stage.quadruples.size();
  if (fs::path(output).has_parent_path()) fs::create_directories(fs::path(output).parent_path());
  ad::save_checkpoint(output, stage.head_params, meta, false);
  if (!quads_out.empty()) write_text(quads_out, serialize_quadruples(stage.quadruples));
  std::cout << json{{"head", output},
                    {"quadruples", stage.quadruples.size()},
                    {"initial_loss", stage.history.initial_loss},
                    {"final_loss", stage.history.epoch_loss.empty() ? 0.0 : stage.history.epoch_loss.back()}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_train(const Globals& g, const std::string& dataset, const std::string& val_path, const std::string& head,
              const std::string& output, const std::string& metrics) {
  const MfdConfig c = resolve_config(g);
  Pipeline pipeline(c, pipeline_options(g));
  const auto train_docs = load_labeled_dataset(dataset, label_format(c));
  const auto val_docs = val_path.empty() ? std::vector<Document>{} : load_labeled_dataset(val_path, label_format(c));

  ad::ParamStore head_params;
  if (!head.empty()) {
    ad::Checkpoint ck = ad::load_checkpoint(head);
    if (ck.metadata.value("format", "") != "mfd-head-v1") throw CheckpointError(head + " is not a head checkpoint");
    head_params = std::move(ck.params);
  } else if (c.model.use_high) {
    const auto [llm_texts, human_texts] = contrastive_texts(train_docs);
    head_params = run_contrastive_stage(pipeline, llm_texts, human_texts).head_params;
  }
  PredictorStage stage = run_predictor_stage(pipeline, train_docs, val_docs, &head_params);

  ModelBundle bundle;
  bundle.norm = stage.norm;
  bundle.config = c;
  bundle.metadata = bundle_metadata(*stage.model, stage.norm, c, pipeline.provenance());
  bundle.metadata["best_epoch"] = stage.train.best_epoch;
  bundle.model = std::move(stage.model);
  bundle.save(output);

  json m = stage.train.to_json();
  m.update(artifact_stamp(c));
  m["config"] = c.to_json();
  if (!metrics.empty()) {
    write_text(metrics, m.dump(2) + "\n");
    write_text(fs::path(metrics).replace_extension(".csv"), stage.train.history_csv());
  }
  json summary = {{"model", output}, {"steps", stage.train.steps}, {"best_epoch", stage.train.best_epoch}};
  summary["config"] = {{"lr", c.train.lr},
                       {"epochs", c.train.epochs},
                       {"beta", c.train.beta},
                       {"heads", c.train.heads},
                       {"batch_train", c.train.batch_train}};
  summary.update(artifact_stamp(c));
  std::cout << summary.dump() << "\n";
  return 0;
}

std::vector<double> parse_thresholds(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--sweep", "not a number: " + item);
    }
  }
  return out;
}

int cmd_evaluate(const Globals& g, const std::string& model, const std::string& dataset, bool binary,
                 const std::string& sweep, const std::string& output, const std::string& sweep_csv) {
  ModelBundle bundle = ModelBundle::load(model);
  MfdConfig c = bundle.config;
  if (g.offline) c.llm.offline = true;
  Pipeline pipeline(c, pipeline_options(g));
  const auto docs = load_labeled_dataset(dataset, binary ? LabelFormat::binary : label_format(c));
  const auto prepared = pipeline.prepare_all(docs, bundle.norm);
  const auto preds = predict_all(*bundle.model, prepared);
  const auto labels = labels_of(prepared);
  const double threshold = g.threshold.value_or(0.5);
  const MetricReport report =
      binary ? binary_generalization_eval(preds, labels, threshold) : regression_metrics(preds, labels, threshold);
  json out = {{"metrics", report.to_json()}, {"dataset", dataset}, {"binary", binary}};
  out["config_hash"] = bundle.metadata.value("config_hash", "");
  out["seed"] = bundle.metadata.value("seed", 0);
  if (!sweep.empty()) {
    const auto rows = threshold_sweep(preds, labels, parse_thresholds(sweep));
    out["threshold_sweep"] = sweep_to_series(rows);
    if (!sweep_csv.empty()) write_text(sweep_csv, sweep_to_csv(rows));
  }
  emit(output, out.dump(2) + "\n");
  return 0;
}

int cmd_features(const Globals& g, const std::string& input, bool layout, const std::string& output,
                 const std::string& segment) {
  if (layout) {
    json m = lowlevel_layout().manifest();
    m["hash"] = lowlevel_layout().hash();
    emit(output, m.dump(2) + "\n");
    return 0;
  }
  MfdConfig c = resolve_config(g);
  if (!segment.empty()) c.data.segment_mode = segment;
  const Document doc = segment_with_config(read_input(input), c);
  std::vector<std::string> texts;
  for (const auto& s : doc.sentences()) texts.push_back(s.text);
  const auto vectors = extract_lowlevel_batch(texts);
  json rows = json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    rows.push_back({{"index", i}, {"text", texts[i]}, {"degenerate", vectors[i].degenerate}, {"values", vectors[i].values}});
  }
  json out = {{"layout_hash", lowlevel_layout().hash()}, {"slots", lowlevel_layout().slots}, {"sentences", rows}};
  out.update(artifact_stamp(c));
  emit(output, out.dump(2) + "\n");
  return 0;
}

int cmd_report(const std::string& input, const std::string& output) {
  json j;
  try {
    j = json::parse(read_input(input));
  } catch (const json::exception& e) {
    throw SchemaError(0, std::string("report is not valid JSON: ") + e.what());
  }
  emit(output, render_html(DetectionReport::from_json(j)));
  return 0;
}

int cmd_synth(const Globals& g, std::size_t documents, std::size_t sentences, const std::string& output,
              const std::string& split_dir) {
  const MfdConfig c = resolve_config(g);
  SynthConfig sc;
  sc.documents = documents;
  sc.sentences_per_doc = sentences;
  sc.seed = c.train.seed;
  const auto docs = synth_corpus(sc);
  if (!output.empty()) emit(output, serialize_dataset(docs));
  if (!split_dir.empty()) {
    fs::create_directories(split_dir);
    const auto split = split_dataset(docs, {0.75, 0.125, 0.125}, c.train.seed);
    save_dataset(fs::path(split_dir) / "train.jsonl", split.train);
    save_dataset(fs::path(split_dir) / "val.jsonl", split.val);
    save_dataset(fs::path(split_dir) / "test.jsonl", split.test);
  }
  return 0;
}

int cmd_ablate(const Globals& g, const std::string& dataset, const std::string& output, const std::string& markdown,
               const std::string& csv) {
  const MfdConfig c = resolve_config(g);
  const auto docs = load_labeled_dataset(dataset, label_format(c));
  const auto split = split_dataset(docs, {0.75, 0.125, 0.125}, c.train.seed);
  const AblationResult result = run_ablation(c, split, pipeline_options(g));
  json out = result.to_json();
  out.update(artifact_stamp(c));
  out["split"] = {{"train", split.train.size()}, {"val", split.val.size()}, {"test", split.test.size()}};
  emit(output, out.dump(2) + "\n");
  if (!markdown.empty()) write_text(markdown, result.to_markdown());
  if (!csv.empty()) write_text(csv, result.to_csv());
  if (!output.empty() && output != "-") std::cout << result.to_markdown();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence-level detector of LLM involvement in lexicon, grammar and syntax"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override train.seed");
  app.add_option("--cache-dir", g.cache_dir, "Embedding and LLM response cache (default $MFD_CACHE_DIR)");
  app.add_flag("--offline", g.offline, "Use the local embedder and rule-based LLM stand-in");
  app.add_option("--provider-url", g.provider_url, "Chat-completions base URL (enables the remote LLM)");
  app.add_option("--threshold", g.threshold, "Involvement floor for detect, binarization threshold for evaluate")
      ->check(CLI::Range(0.0, 1.0));

  std::string model, input, output, format = "json", html, segment, dataset, val, head, metrics, quads, sweep,
                                    sweep_csv, markdown, csv, split_dir;
  bool binary = false, layout = false;
  std::size_t documents = 64, sentences = 8;

  auto* detect = app.add_subcommand("detect", "Score every sentence of a document");
  detect->add_option("--model", model, "Model bundle")->required();
  detect->add_option("--input", input, "Text file, or - for stdin")->default_val("-");
  detect->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "html"}));
  detect->add_option("--output", output, "Output path (default stdout)");
  detect->add_option("--html", html, "Also write the highlight page here");
  detect->add_option("--segment", segment, "delimiter | rule_based")->check(CLI::IsMember({"delimiter", "rule_based"}));

  auto* tc = app.add_subcommand("train-contrastive", "Train the projection head on quadruples");
  tc->add_option("--dataset", dataset, "Labeled JSONL dataset")->required()->check(CLI::ExistingFile);
  tc->add_option("--output", output, "Head checkpoint")->required();
  tc->add_option("--quadruples", quads, "Also write the quadruples as JSONL");

  auto* train = app.add_subcommand("train", "Train the fusion predictor");
  train->add_option("--dataset", dataset, "Training JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--val", val, "Validation JSONL (best epoch by MAE is kept)")->check(CLI::ExistingFile);
  train->add_option("--head", head, "Head checkpoint from train-contrastive (trained inline when absent)")
      ->check(CLI::ExistingFile);
  train->add_option("--output", output, "Model bundle")->required();
  train->add_option("--metrics", metrics, "Training history JSON (a CSV is written beside it)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a labeled dataset");
  evaluate->add_option("--model", model, "Model bundle")->required();
  evaluate->add_option("--dataset", dataset, "Labeled JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_flag("--binary", binary, "Labels are exactly 0/1; accuracy-focused report");
  evaluate->add_option("--sweep", sweep, "Comma-separated thresholds for an accuracy sweep");
  evaluate->add_option("--sweep-csv", sweep_csv, "Write the sweep table as CSV");
  evaluate->add_option("--output", output, "Report path (default stdout)");

  auto* features = app.add_subcommand("features", "Dump low-level feature vectors");
  features->add_option("--input", input, "Text file, or - for stdin")->default_val("-");
  features->add_flag("--layout", layout, "Print the layout manifest instead");
  features->add_option("--output", output, "Output path (default stdout)");
  features->add_option("--segment", segment, "delimiter | rule_based")->check(CLI::IsMember({"delimiter", "rule_based"}));

  auto* report = app.add_subcommand("report", "Render a detection report JSON as HTML");
  report->add_option("--input", input, "Report JSON, or - for stdin")->default_val("-");
  report->add_option("--output", output, "HTML path (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled mixed corpus");
  synth->add_option("--documents", documents, "Number of documents")->check(CLI::PositiveNumber);
  synth->add_option("--sentences", sentences, "Sentences per document")->check(CLI::PositiveNumber);
  synth->add_option("--output", output, "JSONL path (default stdout)");
  synth->add_option("--split-dir", split_dir, "Also write train/val/test splits here");

  auto* config = app.add_subcommand("config", "Print the resolved configuration");

  auto* ablate = app.add_subcommand("ablate", "Train with each feature block disabled and compare");
  ablate->add_option("--dataset", dataset, "Labeled JSONL")->required()->check(CLI::ExistingFile);
  ablate->add_option("--output", output, "Comparison JSON (default stdout)");
  ablate->add_option("--markdown", markdown, "Comparison table as Markdown");
  ablate->add_option("--csv", csv, "Comparison table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", "config", e.what(), 2);
  }

  try {
    if (*detect) return cmd_detect(g, model, input, format, output, html, segment);
    if (*tc) return cmd_train_contrastive(g, dataset, output, quads);
    if (*train) return cmd_train(g, dataset, val, head, output, metrics);
    if (*evaluate) return cmd_evaluate(g, model, dataset, binary, sweep, output, sweep_csv);
    if (*features) return cmd_features(g, input, layout, output, segment);
    if (*report) return cmd_report(input, output);
    if (*synth) return cmd_synth(g, documents, sentences, output, split_dir);
    if (*config) {
      std::cout << resolve_config(g).to_json().dump(2) << "\n";
      return 0;
    }
    if (*ablate) return cmd_ablate(g, dataset, output, markdown, csv);
  } catch (const ConfigError& e) {
    return report_error(e.type(), "config", e.what(), 2, {{"field", e.field()}});
  } catch (const SchemaError& e) {
    return report_error(e.type(), "data", e.what(), 3, {{"line", e.line()}});
  } catch (const ProviderError& e) {
    return report_error(e.type(), "provider", e.what(), 4,
                        {{"attempts", e.attempts()}, {"last_backoff_ms", e.last_backoff_ms()}});
  } catch (const Error& e) {
    return report_error(e.type(), category_name(e.category()), e.what(), exit_code(e.category()));
  } catch (const std::exception& e) {
    return report_error("InternalError", "internal", e.what(), 5);
  }
  return 5;
}
