#include "mfd/llm.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "mfd/annotate.hpp"
#include "mfd/corpus.hpp"
#include "mfd/error.hpp"
#include "mfd/hash.hpp"
#include "mfd/lexicon.hpp"
#include "mfd/paraphrase.hpp"
#include "mfd/unicode.hpp"

namespace mfd {

std::string_view to_string(PromptId id) {
  switch (id) {
    case PromptId::human_like: return "human_like";
    case PromptId::rewrite: return "rewrite";
    case PromptId::linguistic_analysis: return "linguistic_analysis";
  }
  return "rewrite";
}

PromptId parse_prompt_id(std::string_view name) {
  if (name == "human_like") return PromptId::human_like;
  if (name == "rewrite") return PromptId::rewrite;
  if (name == "linguistic_analysis") return PromptId::linguistic_analysis;
  throw ConfigError("prompts.id", "unknown template id '" + std::string(name) + "'");
}

std::string PromptTemplate::hash() const {
  return sha256_hex(std::string(to_string(id)) + '\n' + version + '\n' + text);
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  std::set<std::string> used;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto open = text.find('{', i);
    if (open == std::string::npos) {
      out.append(text, i);
      break;
    }
    const auto close = text.find('}', open);
    if (close == std::string::npos) {
      throw ConfigError("prompts." + std::string(to_string(id)), "unterminated placeholder");
    }
    out.append(text, i, open - i);
    const std::string name = text.substr(open + 1, close - open - 1);
    const auto it = values.find(name);
    if (it == values.end()) {
      throw ConfigError("prompts." + std::string(to_string(id)), "unbound placeholder {" + name + "}");
    }
    out += it->second;
    used.insert(name);
    i = close + 1;
  }
  for (const auto& [k, v] : values) {
    if (!used.count(k)) {
      throw ConfigError("prompts." + std::string(to_string(id)), "template has no placeholder {" + k + "}");
    }
  }
  return out;
}

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  lib.templates_[PromptId::human_like] = {
      PromptId::human_like, "1.0.0",
      "Rewrite the following text so that it reads as if a person wrote it: plainer words, "
      "natural rhythm, same meaning. Return only the rewritten text.\n\n{text}"};
  lib.templates_[PromptId::rewrite] = {
      PromptId::rewrite, "1.0.0",
      "Paraphrase the following text while preserving its meaning. Return only the "
      "paraphrase.\n\n{text}"};
  lib.templates_[PromptId::linguistic_analysis] = {
      PromptId::linguistic_analysis, "1.0.0",
      "Analyze the following text, focusing on its lexicon, grammar, and syntax. For each of "
      "the three, describe notable choices and cite the words or constructions involved.\n\n{text}"};
  return lib;
}

PromptLibrary PromptLibrary::from_json(const nlohmann::json& j) {
  PromptLibrary lib = defaults();
  if (!j.is_object() || !j.contains("templates") || !j["templates"].is_array()) {
    throw ConfigError("prompts.templates", "expected an array of templates");
  }
  for (const auto& t : j["templates"]) {
    if (!t.is_object() || !t.contains("id") || !t.contains("version") || !t.contains("template")) {
      throw ConfigError("prompts.templates", "each template needs id, version and template");
    }
    PromptTemplate p{parse_prompt_id(t["id"].get<std::string>()), t["version"].get<std::string>(),
                     t["template"].get<std::string>()};
    p.render({{"text", ""}});  // placeholders must resolve exactly
    lib.templates_[p.id] = p;
  }
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("prompts", "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("prompts", std::string("invalid JSON: ") + e.what());
  }
}

const PromptTemplate& PromptLibrary::get(PromptId id) const { return templates_.at(id); }

nlohmann::json PromptLibrary::hashes() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, t] : templates_) j[std::string(to_string(id))] = {{"version", t.version}, {"hash", t.hash()}};
  return j;
}

namespace {

nlohmann::json response_to_json(const LlmResponse& r) {
  return {{"text", r.text},
          {"model_id", r.model_id},
          {"usage", {{"prompt_tokens", r.usage.prompt_tokens}, {"completion_tokens", r.usage.completion_tokens}}}};
}

LlmResponse response_from_json(const nlohmann::json& j) {
  LlmResponse r;
  r.text = j.at("text").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<std::size_t>();
  r.usage.completion_tokens = j.at("usage").at("completion_tokens").get<std::size_t>();
  return r;
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in = false;
  for (char c : s) {
    const bool ws = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!ws && !in) ++n;
    in = !ws;
  }
  return n;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string join_list(const std::vector<std::string>& items, std::size_t limit) {
  if (items.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) out += (i ? ", " : "") + items[i];
  return out;
}

}  // namespace

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<LlmResponse> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mu_);
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  if (dir_) {
    std::ifstream in(*dir_ / (key + ".json"));
    if (in) {
      try {
        auto r = response_from_json(nlohmann::json::parse(in));
        memory_[key] = r;
        return r;
      } catch (const std::exception&) {
        // Corrupt entry: treated as a miss.
      }
    }
  }
  return std::nullopt;
}

void ResponseCache::put(const std::string& key, const LlmResponse& response) {
  std::lock_guard lock(mu_);
  memory_[key] = response;
  if (dir_) {
    const auto tmp = *dir_ / (key + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << response_to_json(response).dump();
    }
    std::filesystem::rename(tmp, *dir_ / (key + ".json"));
  }
}

LlmClient::LlmClient(LlmConfig config, PromptLibrary prompts, std::shared_ptr<ResponseCache> cache,
                     std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      prompts_(std::move(prompts)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      transport_(std::move(transport)) {
  if (config_.offline) {
    model_id_ = std::string(kOfflineModelId) + ":seed" + std::to_string(config_.seed) + ":i" +
                fmt("%.6g", config_.offline_intensity);
  } else {
    model_id_ = config_.model;
    if (!transport_) transport_ = std::make_shared<HttplibTransport>();
  }
}

VariantPair LlmClient::generate_variants(std::string_view t_llm) {
  if (unicode::trim(t_llm).empty()) throw PreconditionError("generate_variants needs non-empty text");
  VariantPair v;
  v.human_like = complete(PromptId::human_like, t_llm, config_.temperature_generation);
  v.rewritten = complete(PromptId::rewrite, t_llm, config_.temperature_generation);
  return v;
}

LlmResponse LlmClient::analyze_text(std::string_view full_text) {
  if (unicode::trim(full_text).empty()) throw PreconditionError("analyze_text needs non-empty text");
  return complete(PromptId::linguistic_analysis, full_text, config_.temperature_analysis);
}

LlmResponse LlmClient::complete(PromptId id, std::string_view input, double temperature) {
  const auto& tmpl = prompts_.get(id);
  const std::string key = sha256_hex(tmpl.hash() + '\n' + model_id_ + '\n' + fmt("%.17g", temperature) +
                                     '\n' + std::string(input));
  if (auto hit = cache_->get(key)) {
    hit->cached = true;
    return *hit;
  }
  LlmResponse r = config_.offline
                      ? complete_offline(id, input)
                      : complete_remote(tmpl.render({{"text", std::string(input)}}), temperature);
  if (unicode::trim(r.text).empty()) throw EmptyCompletion("model returned an empty completion");
  cache_->put(key, r);
  r.cached = false;
  return r;
}

LlmResponse LlmClient::complete_offline(PromptId id, std::string_view input) {
  LlmResponse r;
  r.model_id = model_id_;
  switch (id) {
    case PromptId::human_like:
      r.text = paraphrase(input, ParaphraseStyle::humanize, config_.offline_intensity, config_.seed).text;
      break;
    case PromptId::rewrite:
      r.text = paraphrase(input, ParaphraseStyle::formalize, config_.offline_intensity, config_.seed).text;
      break;
    case PromptId::linguistic_analysis:
      r.text = offline_analysis(input);
      break;
  }
  r.usage.prompt_tokens = count_words(prompts_.get(id).render({{"text", std::string(input)}}));
  r.usage.completion_tokens = count_words(r.text);
  return r;
}

LlmResponse LlmClient::complete_remote(const std::string& prompt, double temperature) {
  nlohmann::json req = {{"model", config_.model},
                        {"messages", {{{"role", "user"}, {"content", prompt}}}},
                        {"temperature", temperature}};
  HttpHeaders headers;
  if (const auto key = env_or_empty(config_.api_key_env); !key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + key);
  }
  ++network_requests_;
  const auto res = post_with_retries(*transport_, config_.retry, config_.base_url + "/chat/completions",
                                     req.dump(), headers);
  if (!res.ok) {
    throw LlmUnavailable("chat completion failed after " + std::to_string(res.attempts) +
                             " attempts: " + res.last_error,
                         res.attempts, res.last_backoff_ms);
  }
  LlmResponse r;
  r.model_id = config_.model;
  try {
    const auto body = nlohmann::json::parse(res.body);
    const auto& choice = body.at("choices").at(0);
    if (choice.at("message").at("content").is_string()) {
      r.text = choice["message"]["content"].get<std::string>();
    }
    if (body.contains("model") && body["model"].is_string()) r.model_id = body["model"].get<std::string>();
    if (body.contains("usage")) {
      r.usage.prompt_tokens = body["usage"].value("prompt_tokens", std::size_t{0});
      r.usage.completion_tokens = body["usage"].value("completion_tokens", std::size_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw LlmUnavailable(std::string("malformed chat completion: ") + e.what(), res.attempts,
                         res.last_backoff_ms);
  }
  return r;
}

std::string offline_analysis(std::string_view full_text) {
  const std::string text(full_text);
  const SegmentMode mode = text.find(kSentenceDelimiter) != std::string::npos ? SegmentMode::delimiter
                                                                              : SegmentMode::rule_based;
  const auto sentences = split_sentences(text, mode);
  if (sentences.empty()) throw PreconditionError("analyze_text needs non-empty text");

  std::set<std::string> elaborate_set, plain_set;
  for (const auto& [plain, fancy] : synonym_table()) {
    elaborate_set.insert(fancy);
    plain_set.insert(plain);
  }
  const std::set<std::string> markers(discourse_markers().begin(), discourse_markers().end());

  double words = 0, letters = 0, difficult = 0, func = 0, stop = 0, punct = 0, contractions = 0;
  std::size_t longest = 0;
  std::set<std::string> vocab;
  std::vector<std::string> elaborate, plain, difficult_list, marker_list;
  std::set<std::string> seen_e, seen_p, seen_d, seen_m;
  std::vector<std::string> sentence_lines;
  std::size_t fronted = 0;
  for (std::size_t j = 0; j < sentences.size(); ++j) {
    const auto ann = annotate(sentences[j]);
    std::size_t n = 0;
    std::vector<std::string> notes;
    bool first_word = true;
    for (const auto& t : ann.tokens) {
      if (!t.is_word) {
        if (t.pos == PosTag::PUNCT) punct += 1;
        continue;
      }
      ++n;
      words += 1;
      letters += static_cast<double>(t.letters);
      vocab.insert(t.lower);
      if (t.is_function_word) func += 1;
      if (t.is_stopword) stop += 1;
      if (t.lower.find('\'') != std::string::npos) contractions += 1;
      const bool is_difficult = !t.is_number && t.syllables >= 2 && !lexicon::is_easy_word(t.lower);
      if (is_difficult) {
        difficult += 1;
        if (seen_d.insert(t.lower).second) difficult_list.push_back(t.lower);
      }
      if (elaborate_set.count(t.lower)) {
        if (seen_e.insert(t.lower).second) elaborate.push_back(t.lower);
        notes.push_back(t.lower);
      }
      if (plain_set.count(t.lower) && seen_p.insert(t.lower).second) plain.push_back(t.lower);
      if (first_word) {
        if (markers.count(t.surface) && seen_m.insert(t.lower).second) marker_list.push_back(t.lower);
        static const std::set<std::string> subs = {"because", "when", "although", "while", "if",
                                                   "after", "before", "since", "unless"};
        if (subs.count(t.lower)) ++fronted;
      }
      first_word = false;
    }
    longest = std::max(longest, n);
    sentence_lines.push_back("Sentence " + std::to_string(j + 1) + " has " + std::to_string(n) +
                             " words; elaborate words: " + join_list(notes, 6) + ".");
  }
  const double s = static_cast<double>(sentences.size());
  const double w = std::max(1.0, words);
  std::string out;
  out += "Lexicon: " + fmt("%.0f", words) + " words, " + std::to_string(vocab.size()) +
         " distinct (type-token ratio " + fmt("%.2f", vocab.size() / w) + "), average word length " +
         fmt("%.2f", letters / w) + " letters, " + fmt("%.0f", difficult) +
         " difficult words. Elaborate vocabulary: " + join_list(elaborate, 12) +
         ". Plain vocabulary: " + join_list(plain, 12) + ". Difficult words: " +
         join_list(difficult_list, 12) + ".\n";
  out += "Grammar: function-word ratio " + fmt("%.2f", func / w) + ", stopword ratio " +
         fmt("%.2f", stop / w) + ", " + fmt("%.0f", contractions) + " contractions, " +
         fmt("%.2f", punct / s) + " punctuation marks per sentence. Discourse markers: " +
         join_list(marker_list, 8) + ".\n";
  out += "Syntax: " + fmt("%.0f", s) + " sentences, mean length " + fmt("%.1f", words / s) +
         " words, longest " + std::to_string(longest) + " words, " + std::to_string(fronted) +
         " fronted subordinate clauses.\n";
  for (const auto& line : sentence_lines) out += line + "\n";
  return out;
}

}  // namespace mfd
