#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mfd {

// Rule-based stand-in for an instruction-tuned LLM. `formalize` pushes text
// toward LLM register (plain -> elaborate synonyms, expanded contractions,
// discourse markers, clause fronting); `humanize` goes the other way.
enum class ParaphraseStyle { formalize, humanize };

struct EditStats {
  std::size_t words = 0;
  std::size_t lexical_candidates = 0;  // words with an entry in the synonym table
  std::size_t lexical_edits = 0;
  std::size_t grammar_candidates = 0;  // contractions plus one discourse-marker slot
  std::size_t grammar_edits = 0;
  bool syntax_candidate = false;  // has a reorderable clause pair
  bool syntax_edit = false;

  std::size_t total_edits() const { return lexical_edits + grammar_edits + (syntax_edit ? 1 : 0); }
};

struct ParaphraseResult {
  std::string text;
  EditStats stats;
};

// Deterministic in (text, style, intensity, seed). intensity in [0,1] is the
// per-opportunity edit probability. Inputs of >= 5 words always receive at
// least one edit.
ParaphraseResult paraphrase(std::string_view text, ParaphraseStyle style, double intensity,
                            std::uint64_t seed);

// Plain/elaborate synonym pairs used by both directions.
const std::vector<std::pair<std::string, std::string>>& synonym_table();
const std::vector<std::string>& discourse_markers();

}  // namespace mfd
