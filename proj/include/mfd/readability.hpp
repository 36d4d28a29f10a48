#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfd/annotate.hpp"

namespace mfd {

using NamedValues = std::vector<std::pair<std::string, double>>;

// Raw counts behind every readability formula. Each sentence is scored as a
// one-sentence document, so `sentences` is always 1 here.
struct ReadabilityCounts {
  double sentences = 1;
  double words = 0;
  double syllables = 0;
  double letters = 0;              // alphanumeric characters inside word tokens
  double polysyllables = 0;        // words with >= 3 syllables
  double difficult_words = 0;      // not in the easy-word list and >= 2 syllables
  double osman_long_words = 0;     // words with > 5 letters
  double osman_complex_words = 0;  // words with > 4 syllables
  double linsear_easy = 0;         // first 100 words with < 3 syllables
  double linsear_hard = 0;         // first 100 words with >= 3 syllables
};

// Throws DegenerateInput when the annotation has no word tokens.
ReadabilityCounts readability_counts(const TokenAnnotation& ann);

namespace readability {

double flesch_reading_ease(const ReadabilityCounts& c);
double flesch_kincaid_grade(const ReadabilityCounts& c);
double smog_index(const ReadabilityCounts& c);
double coleman_liau_index(const ReadabilityCounts& c);
double automated_readability_index(const ReadabilityCounts& c);
double dale_chall_readability_score(const ReadabilityCounts& c);
double difficult_words(const ReadabilityCounts& c);
double linsear_write_formula(const ReadabilityCounts& c);
double gunning_fog(const ReadabilityCounts& c);
double fernandez_huerta(const ReadabilityCounts& c);
double szigriszt_pazos(const ReadabilityCounts& c);
double gutierrez_polini(const ReadabilityCounts& c);
double crawford(const ReadabilityCounts& c);
double gulpease_index(const ReadabilityCounts& c);
double osman(const ReadabilityCounts& c);

}  // namespace readability

// Slot names in output order.
const std::vector<std::string>& readability_slot_names();
// Human-readable formula per slot, written into the layout manifest.
const std::vector<std::pair<std::string, std::string>>& readability_formulas();

NamedValues readability_features(const TokenAnnotation& ann);

}  // namespace mfd
