#include "mfd/paraphrase.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "mfd/hash.hpp"
#include "mfd/random.hpp"

namespace mfd {

const std::vector<std::pair<std::string, std::string>>& synonym_table() {
  static const std::vector<std::pair<std::string, std::string>> k = {
      {"use", "utilize"},          {"uses", "utilizes"},         {"used", "utilized"},
      {"show", "demonstrate"},     {"shows", "demonstrates"},    {"showed", "demonstrated"},
      {"help", "facilitate"},      {"helps", "facilitates"},     {"start", "commence"},
      {"starts", "commences"},     {"end", "conclude"},          {"try", "endeavor"},
      {"get", "obtain"},           {"gets", "obtains"},          {"got", "obtained"},
      {"need", "require"},         {"needs", "requires"},        {"about", "approximately"},
      {"enough", "sufficient"},    {"many", "numerous"},         {"buy", "purchase"},
      {"find", "ascertain"},       {"check", "verify"},          {"keep", "maintain"},
      {"give", "provide"},         {"gives", "provides"},        {"think", "contemplate"},
      {"change", "modify"},        {"changes", "modifications"}, {"build", "construct"},
      {"so", "consequently"},      {"but", "however"},           {"also", "additionally"},
      {"important", "crucial"},    {"good", "beneficial"},       {"bad", "detrimental"},
      {"fast", "rapid"},           {"very", "remarkably"},       {"clear", "evident"},
      {"main", "primary"},         {"hard", "challenging"},      {"easy", "straightforward"},
      {"big", "substantial"},      {"small", "modest"},          {"look", "examine"},
      {"looked", "examined"},      {"idea", "notion"},           {"ideas", "notions"},
      {"problem", "challenge"},    {"problems", "challenges"},   {"way", "methodology"},
      {"ways", "methodologies"},   {"part", "component"},        {"parts", "components"},
      {"whole", "entire"},         {"maybe", "potentially"},     {"often", "frequently"},
      {"now", "currently"},        {"later", "subsequently"},    {"first", "initially"},
      {"lots", "myriad"},          {"tell", "inform"},           {"ask", "inquire"},
      {"see", "observe"},          {"saw", "observed"},          {"test", "evaluate"},
      {"tests", "evaluations"},    {"tested", "evaluated"},      {"job", "task"},
      {"work", "endeavor"},        {"live", "reside"},           {"thing", "aspect"},
      {"things", "aspects"},       {"kind", "variety"},          {"sure", "certain"},
      {"almost", "nearly"},        {"results", "outcomes"},      {"method", "approach"},
      {"mostly", "predominantly"}, {"really", "genuinely"},      {"fix", "rectify"},
      {"fixed", "rectified"},      {"set", "establish"},         {"made", "constructed"},
  };
  return k;
}

const std::vector<std::string>& discourse_markers() {
  static const std::vector<std::string> k = {"Moreover", "Furthermore", "Notably", "Additionally",
                                             "Consequently", "Importantly"};
  return k;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& contractions() {
  static const std::vector<std::pair<std::string, std::string>> k = {
      {"don't", "do not"},   {"doesn't", "does not"}, {"didn't", "did not"}, {"can't", "cannot"},
      {"won't", "will not"}, {"isn't", "is not"},     {"aren't", "are not"}, {"wasn't", "was not"},
      {"it's", "it is"},     {"we're", "we are"},     {"they're", "they are"}, {"i'm", "I am"},
      {"that's", "that is"}, {"there's", "there is"}, {"we've", "we have"},  {"couldn't", "could not"},
  };
  return k;
}

const std::vector<std::string>& subordinators() {
  static const std::vector<std::string> k = {"because", "when", "although", "while", "if", "after",
                                             "before", "since", "unless"};
  return k;
}

struct Word {
  std::string core;    // letters/apostrophes
  std::string prefix;  // leading punctuation
  std::string suffix;  // trailing punctuation
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string tok(text.substr(i, j - i));
    Word w;
    std::size_t a = 0, b = tok.size();
    const auto inner = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || (c & 0x80); };
    while (a < b && !inner(tok[a])) ++a;
    while (b > a && !inner(tok[b - 1])) --b;
    w.prefix = tok.substr(0, a);
    w.core = tok.substr(a, b - a);
    w.suffix = tok.substr(b);
    words.push_back(std::move(w));
    i = j;
  }
  return words;
}

std::string join_words(const std::vector<Word>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i].prefix + words[i].core + words[i].suffix;
  }
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_capitalized(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

// Keeps the capitalization shape of `like` on `word`.
std::string match_case(const std::string& word, const std::string& like) {
  if (word.empty()) return word;
  std::string out = word;
  if (is_capitalized(like)) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

void decapitalize_first(std::vector<Word>& words) {
  if (words.empty()) return;
  auto& c = words[0].core;
  // Leave acronyms and "I" alone.
  if (c.size() >= 2 && std::isupper(static_cast<unsigned char>(c[0])) &&
      std::islower(static_cast<unsigned char>(c[1]))) {
    c[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(c[0])));
  }
}

void capitalize_first(std::vector<Word>& words) {
  if (words.empty() || words[0].core.empty()) return;
  auto& c = words[0].core;
  c[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(c[0])));
}

std::string terminal_punct(std::vector<Word>& words) {
  if (words.empty()) return "";
  auto& s = words.back().suffix;
  std::size_t k = s.size();
  while (k > 0 && (s[k - 1] == '.' || s[k - 1] == '!' || s[k - 1] == '?')) --k;
  std::string term = s.substr(k);
  s.erase(k);
  return term;
}

// "A <sub> B." -> "<Sub> B, a." and "<Sub> A, B." -> "B <sub> a."
bool reorder_clauses(std::vector<Word>& words) {
  if (words.size() < 5) return false;
  const auto& subs = subordinators();
  const std::string first = lower(words[0].core);
  if (std::find(subs.begin(), subs.end(), first) != subs.end() && words[0].prefix.empty()) {
    for (std::size_t i = 1; i + 1 < words.size(); ++i) {
      if (words[i].suffix == ",") {
        std::vector<Word> out(words.begin() + i + 1, words.end());
        std::string term = terminal_punct(out);
        if (out.empty()) return false;
        std::vector<Word> lead(words.begin(), words.begin() + i + 1);
        lead.back().suffix.clear();
        decapitalize_first(lead);
        capitalize_first(out);
        out.insert(out.end(), lead.begin(), lead.end());
        out.back().suffix += term.empty() ? "." : term;
        words = std::move(out);
        return true;
      }
    }
    return false;
  }
  for (std::size_t i = 2; i + 2 < words.size(); ++i) {
    const std::string w = lower(words[i].core);
    if (!words[i].prefix.empty()) continue;
    if (std::find(subs.begin(), subs.end(), w) == subs.end()) continue;
    if (!words[i - 1].suffix.empty() && words[i - 1].suffix != ",") continue;
    std::vector<Word> head(words.begin(), words.begin() + i);
    std::vector<Word> tail(words.begin() + i, words.end());
    std::string term = terminal_punct(tail);
    head.back().suffix.clear();
    decapitalize_first(head);
    capitalize_first(tail);
    tail.back().suffix += ",";
    tail.insert(tail.end(), head.begin(), head.end());
    tail.back().suffix += term.empty() ? "." : term;
    words = std::move(tail);
    return true;
  }
  return false;
}

bool has_reorderable_clause(const std::vector<Word>& words) {
  std::vector<Word> copy = words;
  return reorder_clauses(copy);
}

}  // namespace

ParaphraseResult paraphrase(std::string_view text, ParaphraseStyle style, double intensity,
                            std::uint64_t seed) {
  intensity = std::clamp(intensity, 0.0, 1.0);
  Rng rng(splitmix64(seed ^ fnv1a64(text)) ^ (style == ParaphraseStyle::formalize ? 0x51 : 0xa7));
  auto words = split_words(text);
  ParaphraseResult r;
  r.stats.words = words.size();
  const bool formal = style == ParaphraseStyle::formalize;

  std::unordered_map<std::string, std::string> table;
  for (const auto& [plain, fancy] : synonym_table()) {
    if (formal) table.emplace(plain, fancy);
    else table.emplace(fancy, plain);
  }
  std::unordered_map<std::string, std::string> contraction;
  for (const auto& [short_form, long_form] : contractions()) {
    if (formal) contraction.emplace(short_form, long_form);
    else contraction.emplace(lower(long_form), short_form);
  }

  // Lexical pass.
  for (auto& w : words) {
    const std::string key = lower(w.core);
    if (auto it = table.find(key); it != table.end()) {
      ++r.stats.lexical_candidates;
      if (rng.uniform() < intensity) {
        w.core = match_case(it->second, w.core);
        ++r.stats.lexical_edits;
      }
    }
  }

  // Grammar pass: contractions, then the discourse-marker slot.
  std::vector<Word> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto w = words[i];
    const std::string key = lower(w.core);
    if (formal) {
      if (auto it = contraction.find(key); it != contraction.end()) {
        ++r.stats.grammar_candidates;
        if (rng.uniform() < intensity) {
          auto parts = split_words(it->second);
          parts.front().core = match_case(parts.front().core, w.core);
          parts.front().prefix = w.prefix;
          parts.back().suffix = w.suffix;
          out.insert(out.end(), parts.begin(), parts.end());
          ++r.stats.grammar_edits;
          continue;
        }
      }
    } else if (i + 1 < words.size() && w.suffix.empty()) {
      const std::string pair_key = key + " " + lower(words[i + 1].core);
      if (auto it = contraction.find(pair_key); it != contraction.end()) {
        ++r.stats.grammar_candidates;
        if (rng.uniform() < intensity) {
          Word merged{match_case(it->second, w.core), w.prefix, words[i + 1].suffix};
          out.push_back(merged);
          ++i;
          ++r.stats.grammar_edits;
          continue;
        }
      }
    }
    out.push_back(std::move(w));
  }
  words = std::move(out);

  const auto& markers = discourse_markers();
  if (!words.empty()) {
    ++r.stats.grammar_candidates;
    const bool marked = std::any_of(markers.begin(), markers.end(), [&](const std::string& m) {
      return words[0].core == m && words[0].suffix == ",";
    });
    if (formal && !marked && words.size() >= 3 && rng.uniform() < intensity) {
      decapitalize_first(words);
      words.insert(words.begin(), Word{markers[rng.below(markers.size())], "", ","});
      ++r.stats.grammar_edits;
    } else if (!formal && marked && rng.uniform() < intensity) {
      words.erase(words.begin());
      capitalize_first(words);
      ++r.stats.grammar_edits;
    }
  }

  // Syntax pass.
  r.stats.syntax_candidate = has_reorderable_clause(words);
  if (r.stats.syntax_candidate && rng.uniform() < intensity) {
    r.stats.syntax_edit = reorder_clauses(words);
  }

  if (r.stats.total_edits() == 0 && r.stats.words >= 5) {
    // Guaranteed edit: the cheapest available change for the style.
    if (r.stats.syntax_candidate) {
      r.stats.syntax_edit = reorder_clauses(words);
    } else if (formal) {
      decapitalize_first(words);
      words.insert(words.begin(), Word{markers[rng.below(markers.size())], "", ","});
      ++r.stats.grammar_edits;
    } else {
      std::size_t pos = 1 + rng.below(words.size() - 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), Word{"really", "", ""});
      ++r.stats.grammar_edits;
    }
  }
  r.text = join_words(words);
  return r;
}

}  // namespace mfd
