#include "mfd/readability.hpp"

#include <cmath>

#include "mfd/error.hpp"
#include "mfd/lexicon.hpp"

namespace mfd {

ReadabilityCounts readability_counts(const TokenAnnotation& ann) {
  ReadabilityCounts c;
  std::size_t seen = 0;
  for (const auto& t : ann.tokens) {
    if (!t.is_word) continue;
    c.words += 1;
    c.syllables += t.syllables;
    c.letters += static_cast<double>(t.letters);
    if (t.syllables >= 3) c.polysyllables += 1;
    if (t.syllables > 4) c.osman_complex_words += 1;
    if (t.letters > 5) c.osman_long_words += 1;
    if (!t.is_number && t.syllables >= 2 && !lexicon::is_easy_word(t.lower)) c.difficult_words += 1;
    if (seen < 100) {
      (t.syllables >= 3 ? c.linsear_hard : c.linsear_easy) += 1;
    }
    ++seen;
  }
  if (c.words == 0) throw DegenerateInput("sentence has no word tokens");
  return c;
}

namespace readability {

double flesch_reading_ease(const ReadabilityCounts& c) {
  return 206.835 - 1.015 * (c.words / c.sentences) - 84.6 * (c.syllables / c.words);
}

double flesch_kincaid_grade(const ReadabilityCounts& c) {
  return 0.39 * (c.words / c.sentences) + 11.8 * (c.syllables / c.words) - 15.59;
}

double smog_index(const ReadabilityCounts& c) {
  return 1.043 * std::sqrt(c.polysyllables * (30.0 / c.sentences)) + 3.1291;
}

double coleman_liau_index(const ReadabilityCounts& c) {
  const double letters_per_100 = c.letters / c.words * 100.0;
  const double sentences_per_100 = c.sentences / c.words * 100.0;
  return 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
}

double automated_readability_index(const ReadabilityCounts& c) {
  return 4.71 * (c.letters / c.words) + 0.5 * (c.words / c.sentences) - 21.43;
}

double dale_chall_readability_score(const ReadabilityCounts& c) {
  const double pct_difficult = c.difficult_words / c.words * 100.0;
  double score = 0.1579 * pct_difficult + 0.0496 * (c.words / c.sentences);
  if (pct_difficult > 5.0) score += 3.6365;
  return score;
}

double difficult_words(const ReadabilityCounts& c) { return c.difficult_words; }

double linsear_write_formula(const ReadabilityCounts& c) {
  const double r = (c.linsear_easy + 3.0 * c.linsear_hard) / c.sentences;
  return r > 20.0 ? r / 2.0 : (r - 2.0) / 2.0;
}

double gunning_fog(const ReadabilityCounts& c) {
  return 0.4 * ((c.words / c.sentences) + 100.0 * (c.polysyllables / c.words));
}

double fernandez_huerta(const ReadabilityCounts& c) {
  return 206.84 - 60.0 * (c.syllables / c.words) - 1.02 * (c.words / c.sentences);
}

double szigriszt_pazos(const ReadabilityCounts& c) {
  return 206.835 - 62.3 * (c.syllables / c.words) - (c.words / c.sentences);
}

double gutierrez_polini(const ReadabilityCounts& c) {
  return 95.2 - 9.7 * (c.letters / c.words) - 0.35 * (c.words / c.sentences);
}

double crawford(const ReadabilityCounts& c) {
  const double sentences_per_100 = 100.0 * c.sentences / c.words;
  const double syllables_per_100 = 100.0 * c.syllables / c.words;
  return -0.205 * sentences_per_100 + 0.049 * syllables_per_100 - 3.407;
}

double gulpease_index(const ReadabilityCounts& c) {
  return 89.0 + (300.0 * c.sentences - 10.0 * c.letters) / c.words;
}

double osman(const ReadabilityCounts& c) {
  // The Arabic-specific "faseeh" term is zero for non-Arabic text.
  const double per_word =
      (c.osman_long_words + c.syllables + c.osman_complex_words) / c.words;
  return 200.791 - 1.015 * (c.words / c.sentences) - 24.181 * per_word;
}

}  // namespace readability

const std::vector<std::pair<std::string, std::string>>& readability_formulas() {
  static const std::vector<std::pair<std::string, std::string>> kFormulas = {
      {"flesch_reading_ease", "206.835 - 1.015*W/S - 84.6*Syl/W"},
      {"flesch_kincaid_grade", "0.39*W/S + 11.8*Syl/W - 15.59"},
      {"smog_index", "1.043*sqrt(Poly*30/S) + 3.1291"},
      {"coleman_liau_index", "0.0588*(100*L/W) - 0.296*(100*S/W) - 15.8"},
      {"automated_readability_index", "4.71*L/W + 0.5*W/S - 21.43"},
      {"dale_chall_readability_score", "0.1579*(100*D/W) + 0.0496*W/S (+3.6365 if 100*D/W > 5)"},
      {"difficult_words", "D = #words not in easy list with Syl >= 2"},
      {"linsear_write_formula", "r = (easy + 3*hard)/S over first 100 words; r > 20 ? r/2 : (r-2)/2"},
      {"gunning_fog", "0.4*(W/S + 100*Poly/W)"},
      {"fernandez_huerta", "206.84 - 60*Syl/W - 1.02*W/S"},
      {"szigriszt_pazos", "206.835 - 62.3*Syl/W - W/S"},
      {"gutierrez_polini", "95.2 - 9.7*L/W - 0.35*W/S"},
      {"crawford", "-0.205*(100*S/W) + 0.049*(100*Syl/W) - 3.407"},
      {"gulpease_index", "89 + (300*S - 10*L)/W"},
      {"osman", "200.791 - 1.015*W/S - 24.181*(Long5 + Syl + Complex4)/W"},
  };
  return kFormulas;
}

const std::vector<std::string>& readability_slot_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& [name, formula] : readability_formulas()) names.push_back(name);
    return names;
  }();
  return kNames;
}

NamedValues readability_features(const TokenAnnotation& ann) {
  const ReadabilityCounts c = readability_counts(ann);
  using namespace readability;
  return {
      {"flesch_reading_ease", flesch_reading_ease(c)},
      {"flesch_kincaid_grade", flesch_kincaid_grade(c)},
      {"smog_index", smog_index(c)},
      {"coleman_liau_index", coleman_liau_index(c)},
      {"automated_readability_index", automated_readability_index(c)},
      {"dale_chall_readability_score", dale_chall_readability_score(c)},
      {"difficult_words", difficult_words(c)},
      {"linsear_write_formula", linsear_write_formula(c)},
      {"gunning_fog", gunning_fog(c)},
      {"fernandez_huerta", fernandez_huerta(c)},
      {"szigriszt_pazos", szigriszt_pazos(c)},
      {"gutierrez_polini", gutierrez_polini(c)},
      {"crawford", crawford(c)},
      {"gulpease_index", gulpease_index(c)},
      {"osman", osman(c)},
  };
}

}  // namespace mfd
