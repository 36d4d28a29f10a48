#include "mfd/config.hpp"

#include <fstream>
#include <set>

#include "mfd/error.hpp"
#include "mfd/hash.hpp"

namespace mfd {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& root, std::string section) : section_(std::move(section)) {
    if (root.contains(section_)) {
      node_ = &root[section_];
      if (!node_->is_object()) throw ConfigError(section_, "expected an object");
    }
  }

  ~Reader() noexcept(false) {
    if (!node_ || std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : node_->items()) {
      if (!known_.count(k)) throw ConfigError(section_ + "." + k, "unknown field");
    }
  }

  template <typename T>
  void get(const char* name, T& out) {
    known_.insert(name);
    if (!node_ || !node_->contains(name)) return;
    const json& v = (*node_)[name];
    const std::string path = section_ + "." + name;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
      out.clear();
      for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(path, "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    } else {
      static_assert(std::is_integral_v<T>);
      if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())))) {
        throw ConfigError(path, "expected an integer");
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<double>() < 0) throw ConfigError(path, "must be non-negative");
      }
      out = v.is_number_integer() ? v.get<T>() : static_cast<T>(v.get<double>());
    }
  }

 private:
  std::string section_;
  const json* node_ = nullptr;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

}  // namespace

MfdConfig MfdConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::set<std::string> sections = {"train", "model", "contrastive", "embedding",
                                                 "llm", "report", "data"};
  for (const auto& [k, v] : j.items()) {
    if (!sections.count(k)) throw ConfigError(k, "unknown section");
  }
  MfdConfig c;
  {
    Reader r(j, "train");
    auto& t = c.train;
    r.get("lr", t.lr);
    r.get("weight_decay", t.weight_decay);
    r.get("epochs", t.epochs);
    r.get("batch_train", t.batch_train);
    r.get("batch_val", t.batch_val);
    r.get("step_size", t.step_size);
    r.get("gamma", t.gamma);
    r.get("beta", t.beta);
    r.get("heads", t.heads);
    r.get("alpha", t.alpha);
    r.get("seed", t.seed);
  }
  {
    Reader r(j, "model");
    auto& m = c.model;
    r.get("d_proj", m.d_proj);
    r.get("d_ff", m.d_ff);
    r.get("main_hidden", m.main_hidden);
    r.get("eval_hidden", m.eval_hidden);
    r.get("fusion", m.fusion);
    r.get("use_low", m.use_low);
    r.get("use_high", m.use_high);
    r.get("use_deep", m.use_deep);
    r.get("cross_projections", m.cross_projections);
    r.get("normalize_qk", m.normalize_qk);
    r.get("max_chunk_tokens", m.max_chunk_tokens);
  }
  {
    Reader r(j, "contrastive");
    auto& s = c.contrastive;
    r.get("epochs", s.epochs);
    r.get("batch_size", s.batch_size);
    r.get("lr", s.lr);
    r.get("weight_decay", s.weight_decay);
    r.get("step_size", s.step_size);
    r.get("gamma", s.gamma);
  }
  {
    Reader r(j, "embedding");
    auto& e = c.embedding;
    r.get("provider", e.provider);
    r.get("d_model", e.d_model);
    r.get("pooling", e.pooling);
    r.get("seed", e.seed);
    r.get("url", e.url);
    r.get("model", e.model);
    r.get("api_key_env", e.api_key_env);
    r.get("parallelism", e.parallelism);
    r.get("batch_size", e.batch_size);
  }
  {
    Reader r(j, "llm");
    auto& l = c.llm;
    r.get("offline", l.offline);
    r.get("base_url", l.base_url);
    r.get("model", l.model);
    r.get("api_key_env", l.api_key_env);
    r.get("temperature_generation", l.temperature_generation);
    r.get("temperature_analysis", l.temperature_analysis);
    r.get("offline_intensity", l.offline_intensity);
    r.get("prompts", l.prompts);
    r.get("max_attempts", l.max_attempts);
    r.get("base_backoff_ms", l.base_backoff_ms);
  }
  {
    Reader r(j, "report");
    r.get("floor", c.report.floor);
    r.get("bands", c.report.bands);
  }
  {
    Reader r(j, "data");
    r.get("segment_mode", c.data.segment_mode);
    r.get("label_format", c.data.label_format);
  }
  c.validate();
  return c;
}

void MfdConfig::validate() const {
  const auto& t = train;
  require(t.lr > 0, "train.lr", "must be positive");
  require(t.weight_decay >= 0, "train.weight_decay", "must be non-negative");
  require(t.epochs > 0, "train.epochs", "must be positive");
  require(t.batch_train > 0, "train.batch_train", "must be positive");
  require(t.batch_val > 0, "train.batch_val", "must be positive");
  require(t.step_size > 0, "train.step_size", "must be positive");
  require(t.gamma > 0, "train.gamma", "must be positive");
  require(t.beta >= 0, "train.beta", "must be non-negative");
  require(t.heads > 0, "train.heads", "must be positive");
  require(t.alpha > 0, "train.alpha", "must be positive");
  require(embedding.d_model >= 8, "embedding.d_model", "must be >= 8");
  require(embedding.d_model % t.heads == 0, "train.heads", "must divide embedding.d_model");
  require(embedding.provider == "local" || embedding.provider == "remote", "embedding.provider",
          "expected local or remote");
  require(embedding.pooling == "mean" || embedding.pooling == "cls_like", "embedding.pooling",
          "expected mean or cls_like");
  require(embedding.provider != "remote" || !embedding.url.empty(), "embedding.url",
          "required for the remote provider");
  require(embedding.parallelism > 0, "embedding.parallelism", "must be positive");
  require(embedding.batch_size > 0, "embedding.batch_size", "must be positive");
  require(model.d_proj > 0, "model.d_proj", "must be positive");
  require(model.main_hidden > 0, "model.main_hidden", "must be positive");
  require(model.eval_hidden > 0, "model.eval_hidden", "must be positive");
  require(model.fusion == "vector" || model.fusion == "scalar", "model.fusion", "expected vector or scalar");
  require(model.use_low || model.use_high || model.use_deep, "model.use_low",
          "at least one feature block must be enabled");
  require(model.max_chunk_tokens >= 16, "model.max_chunk_tokens", "must be >= 16");
  require(contrastive.epochs > 0, "contrastive.epochs", "must be positive");
  require(contrastive.batch_size > 0, "contrastive.batch_size", "must be positive");
  require(contrastive.lr > 0, "contrastive.lr", "must be positive");
  require(contrastive.weight_decay >= 0, "contrastive.weight_decay", "must be non-negative");
  require(contrastive.step_size > 0, "contrastive.step_size", "must be positive");
  require(contrastive.gamma > 0, "contrastive.gamma", "must be positive");
  require(llm.temperature_generation >= 0, "llm.temperature_generation", "must be non-negative");
  require(llm.temperature_analysis >= 0, "llm.temperature_analysis", "must be non-negative");
  require(llm.offline_intensity >= 0 && llm.offline_intensity <= 1, "llm.offline_intensity",
          "must be in [0,1]");
  require(llm.max_attempts >= 1, "llm.max_attempts", "must be >= 1");
  require(llm.base_backoff_ms >= 0, "llm.base_backoff_ms", "must be non-negative");
  require(report.floor > 0 && report.floor < 1, "report.floor", "must be in (0,1)");
  require(report.bands.size() == 3, "report.bands", "expected three upper edges (low, medium, high)");
  double prev = report.floor;
  for (double b : report.bands) {
    require(b > prev && b < 1, "report.bands", "edges must increase strictly between floor and 1");
    prev = b;
  }
  require(data.segment_mode == "delimiter" || data.segment_mode == "rule_based", "data.segment_mode",
          "expected delimiter or rule_based");
  require(data.label_format == "regression" || data.label_format == "binary", "data.label_format",
          "expected regression or binary");
}

MfdConfig MfdConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

json MfdConfig::to_json() const {
  const auto& t = train;
  const auto& m = model;
  const auto& s = contrastive;
  const auto& e = embedding;
  const auto& l = llm;
  return {
      {"train",
       {{"lr", t.lr}, {"weight_decay", t.weight_decay}, {"epochs", t.epochs}, {"batch_train", t.batch_train},
        {"batch_val", t.batch_val}, {"step_size", t.step_size}, {"gamma", t.gamma}, {"beta", t.beta},
        {"heads", t.heads}, {"alpha", t.alpha}, {"seed", t.seed}}},
      {"model",
       {{"d_proj", m.d_proj}, {"d_ff", m.d_ff}, {"main_hidden", m.main_hidden}, {"eval_hidden", m.eval_hidden},
        {"fusion", m.fusion}, {"use_low", m.use_low}, {"use_high", m.use_high}, {"use_deep", m.use_deep},
        {"cross_projections", m.cross_projections}, {"normalize_qk", m.normalize_qk},
        {"max_chunk_tokens", m.max_chunk_tokens}}},
      {"contrastive",
       {{"epochs", s.epochs}, {"batch_size", s.batch_size}, {"lr", s.lr}, {"weight_decay", s.weight_decay},
        {"step_size", s.step_size}, {"gamma", s.gamma}}},
      {"embedding",
       {{"provider", e.provider}, {"d_model", e.d_model}, {"pooling", e.pooling}, {"seed", e.seed},
        {"url", e.url}, {"model", e.model}, {"api_key_env", e.api_key_env}, {"parallelism", e.parallelism},
        {"batch_size", e.batch_size}}},
      {"llm",
       {{"offline", l.offline}, {"base_url", l.base_url}, {"model", l.model}, {"api_key_env", l.api_key_env},
        {"temperature_generation", l.temperature_generation}, {"temperature_analysis", l.temperature_analysis},
        {"offline_intensity", l.offline_intensity}, {"prompts", l.prompts}, {"max_attempts", l.max_attempts},
        {"base_backoff_ms", l.base_backoff_ms}}},
      {"report", {{"floor", report.floor}, {"bands", report.bands}}},
      {"data", {{"segment_mode", data.segment_mode}, {"label_format", data.label_format}}},
  };
}

std::string MfdConfig::hash() const { return sha256_hex(to_json().dump()); }

}  // namespace mfd
