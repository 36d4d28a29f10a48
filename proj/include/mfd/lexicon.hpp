#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace mfd::lexicon {

// All lookups expect lowercase input.
bool is_stopword(std::string_view word);
bool is_function_word(std::string_view word);
// Familiar-word list used by Dale-Chall and the difficult-word count.
bool is_easy_word(std::string_view word);

// 1-based rank in the bundled frequency list, 0 when unknown.
std::size_t frequency_rank(std::string_view word);
std::size_t frequency_lexicon_size();
// floor(log2(rank)); unknown words get floor(log2(size)) + 2.
int frequency_class(std::string_view word);

// SHA-256 over every bundled list, recorded in the feature layout manifest.
const std::string& version_hash();

}  // namespace mfd::lexicon
