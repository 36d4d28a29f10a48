#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfd {

inline constexpr std::string_view kSentenceDelimiter = "</s>";

// Per-sentence LLM involvement along lexicon, grammar and syntax, each in [0,1].
struct InvolvementScores {
  double lex = 0.0;
  double gram = 0.0;
  double syn = 0.0;

  // Non-finite components become 0; the rest are clamped into [0,1].
  static InvolvementScores clamped(double lex, double gram, double syn);

  std::array<double, 3> as_array() const { return {lex, gram, syn}; }
  double mean() const { return (lex + gram + syn) / 3.0; }
  bool operator==(const InvolvementScores&) const = default;
};

inline constexpr std::array<std::string_view, 3> kDimensionNames = {"lex", "gram", "syn"};

struct Sentence {
  std::string text;
  std::size_t index = 0;
  std::optional<InvolvementScores> labels;

  bool operator==(const Sentence&) const = default;
};

enum class DocumentSource { human, llm, mixed, unknown };

std::string_view to_string(DocumentSource source);
DocumentSource parse_document_source(std::string_view name);

class Document {
 public:
  // Validates that there is at least one sentence and re-numbers indices 0..n-1.
  Document(std::string id, std::vector<Sentence> sentences,
           DocumentSource source = DocumentSource::unknown);

  const std::string& id() const { return id_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  DocumentSource source() const { return source_; }
  std::size_t size() const { return sentences_.size(); }
  bool labeled() const;

  // Sentences joined with the delimiter token.
  std::string joined_text() const;
  // Sentences joined with single spaces.
  std::string plain_text() const;

  bool operator==(const Document&) const = default;

 private:
  std::string id_;
  std::vector<Sentence> sentences_;
  DocumentSource source_;
};

enum class SegmentMode { delimiter, rule_based };

SegmentMode parse_segment_mode(std::string_view name);

// Abbreviations that never end a sentence in rule-based mode (compared case-insensitively).
const std::vector<std::string>& abbreviation_guard_list();

// Splits raw text into sentences. Input is NFC-normalized first.
std::vector<std::string> split_sentences(std::string_view raw, SegmentMode mode);

Document segment_document(std::string_view raw, SegmentMode mode, std::string id = "doc");

enum class LabelFormat { regression, binary };

LabelFormat parse_label_format(std::string_view name);

std::vector<Document> parse_labeled_dataset(std::string_view jsonl, LabelFormat format);
std::vector<Document> load_labeled_dataset(const std::filesystem::path& path, LabelFormat format);

// One JSONL record per document, in the same schema load_labeled_dataset reads.
std::string serialize_dataset(const std::vector<Document>& docs);
void save_dataset(const std::filesystem::path& path, const std::vector<Document>& docs);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<Document> train;
  std::vector<Document> val;
  std::vector<Document> test;
};

// Deterministic shuffle under `seed`; val/test get floor(n * fraction), train gets the rest.
DatasetSplit split_dataset(const std::vector<Document>& docs, SplitFractions fractions,
                           std::uint64_t seed);

}  // namespace mfd
