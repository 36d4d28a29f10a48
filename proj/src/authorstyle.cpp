#include "mfd/authorstyle.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "mfd/error.hpp"
#include "mfd/lexicon.hpp"
#include "mfd/random.hpp"
#include "mfd/unicode.hpp"

namespace mfd {

namespace {

template <typename Key>
double top_frequency(const std::map<Key, std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  std::size_t best = 0;
  for (const auto& [key, n] : counts) best = std::max(best, n);
  return static_cast<double>(best) / static_cast<double>(total);
}

std::vector<std::string> word_list(const TokenAnnotation& ann) {
  std::vector<std::string> words;
  for (const auto& t : ann.tokens) {
    if (t.is_word) words.push_back(t.lower);
  }
  return words;
}

}  // namespace

double yule_k(const std::vector<std::string>& words) {
  if (words.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& w : words) ++freq[w];
  // V_i: number of types occurring exactly i times.
  std::map<std::size_t, std::size_t> spectrum;
  for (const auto& [w, n] : freq) ++spectrum[n];
  double s2 = 0;
  for (const auto& [i, v] : spectrum) s2 += static_cast<double>(i * i) * static_cast<double>(v);
  const double n = static_cast<double>(words.size());
  return 1e4 * (s2 - n) / (n * n);
}

double sichel_s(const std::vector<std::string>& words) {
  if (words.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& w : words) ++freq[w];
  const auto twice = std::count_if(freq.begin(), freq.end(), [](const auto& kv) { return kv.second == 2; });
  return static_cast<double>(twice) / static_cast<double>(freq.size());
}

std::size_t pos_trigram_bucket(PosTag a, PosTag b, PosTag c) {
  const auto code = static_cast<std::uint64_t>(a) * kPosTagCount * kPosTagCount +
                    static_cast<std::uint64_t>(b) * kPosTagCount + static_cast<std::uint64_t>(c);
  return static_cast<std::size_t>(splitmix64(code) % kPosTrigramBuckets);
}

AuthorstyleScalars authorstyle_scalars(const TokenAnnotation& ann) {
  const auto words = word_list(ann);
  if (words.empty()) throw DegenerateInput("sentence has no word tokens");
  const double w = static_cast<double>(words.size());
  AuthorstyleScalars s;

  double total_len = 0, syllables = 0, stop = 0, func = 0, freq_class_sum = 0, freq_class_n = 0;
  std::map<std::string, std::size_t> content;
  std::map<std::u32string, std::size_t> char_bigrams;
  std::size_t char_bigram_total = 0;
  for (const auto& t : ann.tokens) {
    if (!t.is_word) continue;
    total_len += static_cast<double>(t.length);
    syllables += t.syllables;
    if (t.is_stopword) stop += 1;
    else ++content[t.lower];
    if (t.is_function_word) func += 1;
    if (!t.is_number) {
      freq_class_sum += lexicon::frequency_class(t.lower);
      freq_class_n += 1;
    }
    const auto cps = unicode::decode(t.lower);
    for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
      ++char_bigrams[std::u32string{cps[i], cps[i + 1]}];
      ++char_bigram_total;
    }
  }
  s.avg_word_length = total_len / w;
  s.avg_sentence_length_words = w;
  s.avg_syllables_per_word = syllables / w;
  s.stopword_ratio = stop / w;
  s.function_word_freq = func / w;
  s.avg_word_frequency_class = freq_class_n > 0 ? freq_class_sum / freq_class_n : 0.0;
  s.yule_k = yule_k(words);
  s.sichel_s = sichel_s(words);
  s.most_common_content_word_freq = top_frequency(content, words.size());
  s.top_char_bigram_freq = top_frequency(char_bigrams, char_bigram_total);

  std::map<std::string, std::size_t> bigrams, trigrams;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) ++bigrams[words[i] + ' ' + words[i + 1]];
  for (std::size_t i = 0; i + 2 < words.size(); ++i) {
    ++trigrams[words[i] + ' ' + words[i + 1] + ' ' + words[i + 2]];
  }
  s.top_word_bigram_freq = top_frequency(bigrams, words.size() >= 2 ? words.size() - 1 : 0);
  s.top_word_trigram_freq = top_frequency(trigrams, words.size() >= 3 ? words.size() - 2 : 0);

  const auto cps = unicode::decode(ann.text);
  double punct = 0, special = 0, upper = 0, digits = 0, non_space = 0;
  for (char32_t c : cps) {
    if (unicode::is_space(c)) continue;
    non_space += 1;
    if (unicode::is_upper(c)) upper += 1;
    if (unicode::is_digit(c)) digits += 1;
    if (unicode::is_punct(c)) punct += 1;
    else if (!unicode::is_alnum(c)) special += 1;
  }
  const double chars = static_cast<double>(cps.size());
  s.avg_sentence_length_chars = non_space;
  s.punctuation_freq = punct / chars;
  s.special_char_freq = special / chars;
  s.uppercase_freq = upper / chars;
  s.number_freq = digits / chars;
  return s;
}

const std::vector<std::string>& authorstyle_slot_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> n;
    n.push_back("avg_word_length");
    for (auto tag : kPosTagNames) n.push_back("pos_freq." + std::string(tag));
    for (std::size_t b = 0; b < kPosTrigramBuckets; ++b) n.push_back("pos_trigram." + std::to_string(b));
    for (std::size_t b = 1; b < kWordLengthBins; ++b) n.push_back("word_length." + std::to_string(b));
    n.push_back("word_length.15+");
    n.push_back("avg_sentence_length_words");
    n.push_back("avg_sentence_length_chars");
    n.push_back("avg_syllables_per_word");
    std::size_t lo = 1;
    for (std::size_t edge : kSentenceLengthBinEdges) {
      n.push_back("sentence_length." + std::to_string(lo) + "-" + std::to_string(edge));
      lo = edge + 1;
    }
    n.push_back("sentence_length." + std::to_string(lo) + "+");
    for (const char* name : {"yule_k", "sichel_s", "avg_word_frequency_class", "punctuation_freq",
                             "special_char_freq", "uppercase_freq", "number_freq",
                             "function_word_freq", "most_common_content_word_freq",
                             "stopword_ratio", "top_word_bigram_freq", "top_char_bigram_freq",
                             "top_word_trigram_freq"}) {
      n.push_back(name);
    }
    return n;
  }();
  return kNames;
}

NamedValues authorstyle_features(const TokenAnnotation& ann) {
  const AuthorstyleScalars s = authorstyle_scalars(ann);
  const auto& names = authorstyle_slot_names();
  std::vector<double> values;
  values.reserve(names.size());

  values.push_back(s.avg_word_length);

  std::vector<double> pos(kPosTagCount, 0.0);
  for (const auto& t : ann.tokens) pos[static_cast<std::size_t>(t.pos)] += 1;
  for (double& p : pos) p /= static_cast<double>(ann.tokens.size());
  values.insert(values.end(), pos.begin(), pos.end());

  std::vector<double> tri(kPosTrigramBuckets, 0.0);
  if (ann.tokens.size() >= 3) {
    const double total = static_cast<double>(ann.tokens.size() - 2);
    for (std::size_t i = 0; i + 2 < ann.tokens.size(); ++i) {
      tri[pos_trigram_bucket(ann.tokens[i].pos, ann.tokens[i + 1].pos, ann.tokens[i + 2].pos)] += 1.0 / total;
    }
  }
  values.insert(values.end(), tri.begin(), tri.end());

  std::vector<double> lengths(kWordLengthBins, 0.0);
  const double w = s.avg_sentence_length_words;
  for (const auto& t : ann.tokens) {
    if (!t.is_word) continue;
    const std::size_t bin = std::min(t.length, kWordLengthBins) - 1;
    lengths[bin] += 1.0 / w;
  }
  values.insert(values.end(), lengths.begin(), lengths.end());

  values.push_back(s.avg_sentence_length_words);
  values.push_back(s.avg_sentence_length_chars);
  values.push_back(s.avg_syllables_per_word);

  // A single sentence puts all mass into one bin.
  std::vector<double> sent(kSentenceLengthBins, 0.0);
  std::size_t bin = 0;
  while (bin < std::size(kSentenceLengthBinEdges) &&
         static_cast<std::size_t>(w) > kSentenceLengthBinEdges[bin]) {
    ++bin;
  }
  sent[bin] = 1.0;
  values.insert(values.end(), sent.begin(), sent.end());

  for (double v : {s.yule_k, s.sichel_s, s.avg_word_frequency_class, s.punctuation_freq,
                   s.special_char_freq, s.uppercase_freq, s.number_freq, s.function_word_freq,
                   s.most_common_content_word_freq, s.stopword_ratio, s.top_word_bigram_freq,
                   s.top_char_bigram_freq, s.top_word_trigram_freq}) {
    values.push_back(v);
  }

  NamedValues out;
  out.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], values[i]);
  return out;
}

}  // namespace mfd
