#include "mfd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mfd/error.hpp"
#include "mfd/random.hpp"
#include "mfd/unicode.hpp"

namespace mfd {

using nlohmann::json;

InvolvementScores InvolvementScores::clamped(double lex, double gram, double syn) {
  auto clamp01 = [](double v) { return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0; };
  return {clamp01(lex), clamp01(gram), clamp01(syn)};
}

std::string_view to_string(DocumentSource source) {
  switch (source) {
    case DocumentSource::human: return "human";
    case DocumentSource::llm: return "llm";
    case DocumentSource::mixed: return "mixed";
    case DocumentSource::unknown: return "unknown";
  }
  return "unknown";
}

DocumentSource parse_document_source(std::string_view name) {
  if (name == "human") return DocumentSource::human;
  if (name == "llm") return DocumentSource::llm;
  if (name == "mixed") return DocumentSource::mixed;
  if (name == "unknown") return DocumentSource::unknown;
  throw DatasetError("unknown document source '" + std::string(name) + "'");
}

Document::Document(std::string id, std::vector<Sentence> sentences, DocumentSource source)
    : id_(std::move(id)), sentences_(std::move(sentences)), source_(source) {
  if (sentences_.empty()) throw EmptyDocument("document '" + id_ + "' has no sentences");
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (unicode::trim(sentences_[i].text).empty()) {
      throw EmptyDocument("document '" + id_ + "' has an empty sentence at " + std::to_string(i));
    }
    sentences_[i].index = i;
  }
}

bool Document::labeled() const {
  return std::all_of(sentences_.begin(), sentences_.end(),
                     [](const Sentence& s) { return s.labels.has_value(); });
}

std::string Document::joined_text() const {
  std::string out;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (i) out += kSentenceDelimiter;
    out += sentences_[i].text;
  }
  return out;
}

std::string Document::plain_text() const {
  std::string out;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (i) out += ' ';
    out += sentences_[i].text;
  }
  return out;
}

SegmentMode parse_segment_mode(std::string_view name) {
  if (name == "delimiter") return SegmentMode::delimiter;
  if (name == "rule_based" || name == "rule-based") return SegmentMode::rule_based;
  throw ConfigError("segment", "unknown segmentation mode '" + std::string(name) + "'");
}

const std::vector<std::string>& abbreviation_guard_list() {
  static const std::vector<std::string> kGuards = {
      "e.g.", "i.e.", "et al.", "fig.", "figs.", "eq.", "eqs.", "sec.", "ref.", "refs.",
      "tab.", "vs.", "cf.", "etc.", "approx.", "no.", "vol.", "pp.", "ch.", "dr.",
      "mr.", "mrs.", "ms.", "prof.", "jr.", "sr.", "st.", "inc.", "ltd.", "co.",
  };
  return kGuards;
}

namespace {

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

bool is_closing(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'”' || c == U'’';
}

bool is_opening(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == U'“' || c == U'‘';
}

// True when the text ending at `end` (inclusive) is a guarded abbreviation
// that starts at a word boundary.
bool ends_with_guard(const std::vector<char32_t>& cps, std::size_t end) {
  for (const auto& guard : abbreviation_guard_list()) {
    const auto g = unicode::decode(guard);
    if (g.size() > end + 1) continue;
    const std::size_t start = end + 1 - g.size();
    bool match = true;
    for (std::size_t k = 0; k < g.size() && match; ++k) {
      match = unicode::to_lower(cps[start + k]) == g[k];
    }
    if (!match) continue;
    if (start == 0 || unicode::is_space(cps[start - 1]) || is_opening(cps[start - 1])) return true;
  }
  return false;
}

void push_trimmed(std::vector<std::string>& out, std::string_view piece) {
  auto t = unicode::trim(piece);
  if (!t.empty()) out.push_back(std::move(t));
}

std::vector<std::string> split_rule_based(const std::string& text) {
  const auto cps = unicode::decode(text);
  std::vector<std::string> out;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_terminal(cps[i])) {
      ++i;
      continue;
    }
    std::size_t last = i;
    while (last + 1 < cps.size() && (is_terminal(cps[last + 1]) || is_closing(cps[last + 1]))) {
      ++last;
    }
    std::size_t k = last + 1;
    if (k >= cps.size() || !unicode::is_space(cps[k])) {
      i = last + 1;
      continue;
    }
    while (k < cps.size() && unicode::is_space(cps[k])) ++k;
    std::size_t probe = k;
    while (probe < cps.size() && is_opening(cps[probe])) ++probe;
    const bool next_starts =
        probe < cps.size() && (unicode::is_upper(cps[probe]) || unicode::is_digit(cps[probe]));
    const bool guarded = cps[i] == U'.' && ends_with_guard(cps, i);
    if (next_starts && !guarded) {
      push_trimmed(out, unicode::encode(std::vector<char32_t>(
                            cps.begin() + static_cast<std::ptrdiff_t>(begin),
                            cps.begin() + static_cast<std::ptrdiff_t>(last + 1))));
      begin = k;
    }
    i = k;
  }
  if (begin < cps.size()) {
    push_trimmed(out, unicode::encode(std::vector<char32_t>(
                          cps.begin() + static_cast<std::ptrdiff_t>(begin), cps.end())));
  }
  return out;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view raw, SegmentMode mode) {
  const std::string text = unicode::nfc(raw);
  if (mode == SegmentMode::rule_based) return split_rule_based(text);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(kSentenceDelimiter, pos);
    if (next == std::string::npos) {
      push_trimmed(out, std::string_view(text).substr(pos));
      break;
    }
    push_trimmed(out, std::string_view(text).substr(pos, next - pos));
    pos = next + kSentenceDelimiter.size();
  }
  return out;
}

Document segment_document(std::string_view raw, SegmentMode mode, std::string id) {
  auto pieces = split_sentences(raw, mode);
  if (pieces.empty()) throw EmptyDocument("no non-empty sentence in input");
  std::vector<Sentence> sentences;
  sentences.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    sentences.push_back({std::move(pieces[i]), i, std::nullopt});
  }
  return Document(std::move(id), std::move(sentences));
}

LabelFormat parse_label_format(std::string_view name) {
  if (name == "regression") return LabelFormat::regression;
  if (name == "binary") return LabelFormat::binary;
  throw ConfigError("format", "unknown label format '" + std::string(name) + "'");
}

namespace {

double read_label(const json& value, std::size_t line, LabelFormat format) {
  double v;
  if (value.is_boolean()) {
    v = value.get<bool>() ? 1.0 : 0.0;
  } else if (value.is_number()) {
    v = value.get<double>();
  } else {
    throw SchemaError(line, "label values must be numbers");
  }
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw LabelRangeError("line " + std::to_string(line) + ": label " + value.dump() +
                          " outside [0,1]");
  }
  if (format == LabelFormat::binary) {
    if (v != 0.0 && v != 1.0) {
      throw LabelRangeError("line " + std::to_string(line) + ": binary label " + value.dump() +
                            " is not 0 or 1");
    }
  }
  return v;
}

Document parse_record(const std::string& raw_line, std::size_t line, LabelFormat format) {
  json rec;
  try {
    rec = json::parse(raw_line);
  } catch (const json::parse_error& e) {
    throw SchemaError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!rec.is_object()) throw SchemaError(line, "record must be a JSON object");
  if (!rec.contains("id") || !rec["id"].is_string()) throw SchemaError(line, "missing string field 'id'");
  if (!rec.contains("text") || !rec["text"].is_string()) {
    throw SchemaError(line, "missing string field 'text'");
  }
  if (!rec.contains("labels") || !rec["labels"].is_array()) {
    throw SchemaError(line, "missing array field 'labels'");
  }
  auto pieces = split_sentences(rec["text"].get<std::string>(), SegmentMode::delimiter);
  const auto& labels = rec["labels"];
  if (labels.size() != pieces.size()) {
    throw SchemaError(line, "labels array has " + std::to_string(labels.size()) +
                                " entries but text has " + std::to_string(pieces.size()) +
                                " sentences");
  }
  if (pieces.empty()) throw SchemaError(line, "record has no sentences");
  std::vector<Sentence> sentences;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& triple = labels[i];
    if (!triple.is_array() || triple.size() != 3) {
      throw SchemaError(line, "label " + std::to_string(i) + " must be [lex, gram, syn]");
    }
    InvolvementScores s{read_label(triple[0], line, format), read_label(triple[1], line, format),
                        read_label(triple[2], line, format)};
    sentences.push_back({std::move(pieces[i]), i, s});
  }
  DocumentSource source = DocumentSource::unknown;
  if (rec.contains("source")) {
    if (!rec["source"].is_string()) throw SchemaError(line, "'source' must be a string");
    try {
      source = parse_document_source(rec["source"].get<std::string>());
    } catch (const DatasetError& e) {
      throw SchemaError(line, e.what());
    }
  }
  return Document(rec["id"].get<std::string>(), std::move(sentences), source);
}

}  // namespace

std::vector<Document> parse_labeled_dataset(std::string_view jsonl, LabelFormat format) {
  std::vector<Document> docs;
  std::istringstream in{std::string(jsonl)};
  std::string raw_line;
  std::size_t line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    if (unicode::trim(raw_line).empty()) continue;
    docs.push_back(parse_record(raw_line, line, format));
  }
  return docs;
}

std::vector<Document> load_labeled_dataset(const std::filesystem::path& path, LabelFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labeled_dataset(buf.str(), format);
}

std::string serialize_dataset(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    json labels = json::array();
    for (const auto& s : doc.sentences()) {
      if (!s.labels) throw DatasetError("document '" + doc.id() + "' is not fully labeled");
      labels.push_back({s.labels->lex, s.labels->gram, s.labels->syn});
    }
    json rec = {{"id", doc.id()}, {"text", doc.joined_text()}, {"labels", labels}};
    if (doc.source() != DocumentSource::unknown) rec["source"] = std::string(to_string(doc.source()));
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset " + path.string());
  out << serialize_dataset(docs);
}

DatasetSplit split_dataset(const std::vector<Document>& docs, SplitFractions fractions,
                           std::uint64_t seed) {
  const double total = fractions.train + fractions.val + fractions.test;
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(total - 1.0) > 1e-9) {
    throw InvalidFractions("split fractions must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const auto n = static_cast<double>(docs.size());
  // 1e-9 absorbs representation error such as 0.29 * 100 = 28.999999999999996.
  const auto n_val = static_cast<std::size_t>(std::floor(n * fractions.val + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * fractions.test + 1e-9));
  const std::size_t n_train = docs.size() - n_val - n_test;

  DatasetSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& d = docs[order[i]];
    if (i < n_train) split.train.push_back(d);
    else if (i < n_train + n_val) split.val.push_back(d);
    else split.test.push_back(d);
  }
  return split;
}

}  // namespace mfd
