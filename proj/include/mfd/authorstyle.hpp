#pragma once

#include <string>
#include <vector>

#include "mfd/annotate.hpp"
#include "mfd/readability.hpp"

namespace mfd {

inline constexpr std::size_t kPosTrigramBuckets = 32;
inline constexpr std::size_t kWordLengthBins = 15;  // 1..14, 15+
// Upper bounds (inclusive) of the sentence-length bins, in words; the last bin is open.
inline constexpr std::size_t kSentenceLengthBinEdges[] = {5, 10, 15, 20, 30, 40};
inline constexpr std::size_t kSentenceLengthBins = std::size(kSentenceLengthBinEdges) + 1;

// Stylometric scalars; vector-valued groups are expanded into fixed slots by
// authorstyle_features().
struct AuthorstyleScalars {
  double avg_word_length = 0;
  double avg_sentence_length_words = 0;
  double avg_sentence_length_chars = 0;  // non-space characters
  double avg_syllables_per_word = 0;
  double yule_k = 0;
  double sichel_s = 0;
  double avg_word_frequency_class = 0;
  double punctuation_freq = 0;   // per character
  double special_char_freq = 0;  // neither alphanumeric, punctuation nor space, per character
  double uppercase_freq = 0;
  double number_freq = 0;  // digits per character
  double function_word_freq = 0;
  double most_common_content_word_freq = 0;
  double stopword_ratio = 0;
  double top_word_bigram_freq = 0;
  double top_char_bigram_freq = 0;  // within-word, lowercase
  double top_word_trigram_freq = 0;
};

// Throws DegenerateInput when there are no word tokens.
AuthorstyleScalars authorstyle_scalars(const TokenAnnotation& ann);

// Yule's K over a list of (lowercased) tokens.
double yule_k(const std::vector<std::string>& words);
// Fraction of vocabulary types that occur exactly twice.
double sichel_s(const std::vector<std::string>& words);

std::size_t pos_trigram_bucket(PosTag a, PosTag b, PosTag c);

const std::vector<std::string>& authorstyle_slot_names();

NamedValues authorstyle_features(const TokenAnnotation& ann);

}  // namespace mfd
