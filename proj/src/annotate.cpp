#include "mfd/annotate.hpp"

#include <algorithm>
#include <unordered_map>

#include "mfd/lexicon.hpp"
#include "mfd/unicode.hpp"

namespace mfd {

std::string_view to_string(PosTag tag) { return kPosTagNames[static_cast<std::size_t>(tag)]; }

std::size_t TokenAnnotation::word_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

namespace {

bool is_vowel(char32_t c) {
  static constexpr std::u32string_view kVowels = U"aeiouyàáâäèéêëìíîïòóôöùúûüý";
  return kVowels.find(c) != std::u32string_view::npos;
}

bool is_joiner(char32_t c) { return c == U'\'' || c == U'’' || c == U'-'; }

}  // namespace

int count_syllables(std::string_view word) {
  std::vector<char32_t> letters;
  for (char32_t c : unicode::decode(word)) {
    if (unicode::is_alpha(c)) letters.push_back(unicode::to_lower(c));
  }
  if (letters.empty()) return 1;
  int groups = 0;
  bool in_group = false;
  for (char32_t c : letters) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = letters.size();
  if (groups > 1 && letters[n - 1] == U'e' && !is_vowel(letters[n - 2])) {
    const bool consonant_le = letters[n - 2] == U'l' && n >= 3 && !is_vowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

std::vector<Token> tokenize(std::string_view text) {
  const auto cps = unicode::decode(text);
  std::vector<Token> tokens;
  auto emit = [&](std::size_t b, std::size_t e, bool word) {
    Token t;
    std::vector<char32_t> piece(cps.begin() + static_cast<std::ptrdiff_t>(b),
                                cps.begin() + static_cast<std::ptrdiff_t>(e));
    t.surface = unicode::encode(piece);
    t.lower = unicode::to_lower(t.surface);
    t.length = piece.size();
    t.letters = static_cast<std::size_t>(std::count_if(piece.begin(), piece.end(), unicode::is_alnum));
    t.is_word = word;
    tokens.push_back(std::move(t));
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i];
    if (unicode::is_space(c)) {
      ++i;
      continue;
    }
    if (!unicode::is_alnum(c)) {
      emit(i, i + 1, false);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < cps.size()) {
      if (unicode::is_alnum(cps[j])) {
        ++j;
        continue;
      }
      const bool has_next = j + 1 < cps.size();
      if (has_next && is_joiner(cps[j]) && unicode::is_alpha(cps[j - 1]) &&
          unicode::is_alpha(cps[j + 1])) {
        j += 2;
        continue;
      }
      if (has_next && (cps[j] == U'.' || cps[j] == U',') && unicode::is_digit(cps[j - 1]) &&
          unicode::is_digit(cps[j + 1])) {
        j += 2;
        continue;
      }
      break;
    }
    emit(i, j, true);
    i = j;
  }
  return tokens;
}

namespace {

const std::unordered_map<std::string, PosTag>& closed_class() {
  static const std::unordered_map<std::string, PosTag> kTable = [] {
    std::unordered_map<std::string, PosTag> m;
    auto add = [&m](PosTag tag, std::initializer_list<const char*> words) {
      for (const char* w : words) m.emplace(w, tag);
    };
    add(PosTag::DET, {"a", "an", "the", "this", "that", "these", "those", "my", "your", "his",
                      "her", "its", "our", "their", "some", "any", "each", "every", "no", "all",
                      "both", "either", "neither", "another"});
    add(PosTag::PRON, {"i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them",
                       "myself", "yourself", "himself", "herself", "itself", "ourselves",
                       "themselves", "yourselves", "who", "whom", "whose", "which", "what",
                       "mine", "yours", "hers", "ours", "theirs"});
    add(PosTag::ADP, {"of", "in", "on", "at", "by", "for", "with", "about", "against", "between",
                      "into", "through", "during", "before", "after", "above", "below", "from",
                      "over", "under", "around", "among", "within", "without", "upon", "across",
                      "along", "toward", "towards", "behind", "beyond", "via", "per", "near"});
    add(PosTag::CONJ, {"and", "but", "or", "nor", "yet", "if", "because", "although", "though",
                       "while", "whereas", "unless", "since", "until", "as", "whether", "than"});
    add(PosTag::PRT, {"to", "not", "n't", "up", "out", "off", "down"});
    add(PosTag::ADV, {"very", "also", "just", "only", "then", "there", "here", "now", "often",
                      "always", "never", "really", "too", "quite", "rather", "almost", "already",
                      "still", "even", "however", "thus", "therefore", "so", "again", "further",
                      "once", "well", "moreover", "furthermore", "indeed", "notably"});
    add(PosTag::NUM, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
                      "ten", "hundred", "thousand", "million", "billion"});
    add(PosTag::VERB,
        {"is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "do",
         "does", "did", "will", "would", "shall", "should", "can", "could", "may", "might",
         "must", "sat", "said", "made", "went", "got", "took", "came", "saw", "knew", "thought",
         "found", "gave", "told", "became", "left", "felt", "put", "brought", "began", "kept",
         "held", "wrote", "stood", "heard", "let", "meant", "met", "ran", "paid", "sent", "built",
         "show", "shows", "use", "uses", "make", "makes", "propose", "proposes", "present",
         "presents", "provide", "provides", "improve", "improves", "achieve", "achieves",
         "demonstrate", "demonstrates", "outperform", "outperforms", "reduce", "reduces",
         "include", "includes", "require", "requires", "suggest", "suggests", "help", "helps",
         "get", "gets", "go", "goes", "see", "sees", "run", "runs", "give", "gives", "take",
         "takes", "find", "finds", "work", "works", "seem", "seems", "allow", "allows"});
    return m;
  }();
  return kTable;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

PosTag tag_word(std::string_view lower, PosTag previous) {
  const auto& table = closed_class();
  if (auto it = table.find(std::string(lower)); it != table.end()) return it->second;
  const auto cps = unicode::decode(lower);
  if (!cps.empty() && std::all_of(cps.begin(), cps.end(), [](char32_t c) {
        return unicode::is_digit(c) || c == U'.' || c == U',';
      })) {
    return PosTag::NUM;
  }
  if (ends_with(lower, "ly")) return PosTag::ADV;
  if (ends_with(lower, "ing") || ends_with(lower, "ed")) return PosTag::VERB;
  if (previous == PosTag::PRON || previous == PosTag::PRT) return PosTag::VERB;
  for (std::string_view suf : {"ize", "ise", "ify", "ate"}) {
    if (ends_with(lower, suf)) return PosTag::VERB;
  }
  for (std::string_view suf : {"ous", "ful", "able", "ible", "ive", "ic", "al", "less", "ent",
                               "ant", "ary"}) {
    if (ends_with(lower, suf)) return PosTag::ADJ;
  }
  return PosTag::NOUN;
}

TokenAnnotation annotate(std::string_view sentence_text) {
  TokenAnnotation ann;
  ann.text = unicode::trim(unicode::nfc(sentence_text));
  ann.tokens = tokenize(ann.text);
  PosTag previous = PosTag::PUNCT;
  for (auto& t : ann.tokens) {
    if (t.is_word) {
      t.syllables = count_syllables(t.surface);
      t.is_stopword = lexicon::is_stopword(t.lower);
      t.is_function_word = lexicon::is_function_word(t.lower);
      t.pos = tag_word(t.lower, previous);
      t.is_number = t.pos == PosTag::NUM && unicode::is_digit(unicode::decode(t.lower).front());
    } else {
      const char32_t c = unicode::decode(t.surface).front();
      t.pos = unicode::is_punct(c) ? PosTag::PUNCT : PosTag::X;
    }
    previous = t.pos;
  }
  return ann;
}

}  // namespace mfd
