#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mfd/corpus.hpp"

namespace mfd {

// Coarse universal tag set.
enum class PosTag { NOUN, VERB, ADJ, ADV, PRON, DET, ADP, CONJ, NUM, PRT, PUNCT, X };

inline constexpr std::size_t kPosTagCount = 12;
inline constexpr std::array<std::string_view, kPosTagCount> kPosTagNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CONJ", "NUM", "PRT", "PUNCT", "X"};

std::string_view to_string(PosTag tag);

struct Token {
  std::string surface;
  std::string lower;
  PosTag pos = PosTag::X;
  int syllables = 0;  // >= 1 for word tokens, 0 otherwise
  bool is_word = false;
  bool is_number = false;
  bool is_stopword = false;
  bool is_function_word = false;
  std::size_t length = 0;   // code points in surface
  std::size_t letters = 0;  // alphanumeric code points in surface
};

struct TokenAnnotation {
  std::string text;  // trimmed, NFC sentence text
  std::vector<Token> tokens;

  std::size_t word_count() const;
  // No word tokens: readability and authorstyle features are undefined.
  bool degenerate() const { return word_count() == 0; }
};

// Vowel-group count with a silent-e rule; never below 1.
int count_syllables(std::string_view word);

// Whitespace split, then word runs vs. single punctuation/symbol characters.
std::vector<Token> tokenize(std::string_view text);

PosTag tag_word(std::string_view lower, PosTag previous);

TokenAnnotation annotate(std::string_view sentence_text);
inline TokenAnnotation annotate(const Sentence& s) { return annotate(s.text); }

}  // namespace mfd
