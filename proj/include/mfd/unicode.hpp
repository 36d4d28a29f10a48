#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mfd::unicode {

// NFC-normalizes UTF-8 text; invalid sequences are replaced with U+FFFD.
std::string nfc(std::string_view utf8);

std::vector<char32_t> decode(std::string_view utf8);
std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

bool is_alpha(char32_t cp);
bool is_digit(char32_t cp);
bool is_alnum(char32_t cp);
bool is_upper(char32_t cp);
bool is_space(char32_t cp);
// Unicode general category P*.
bool is_punct(char32_t cp);
char32_t to_lower(char32_t cp);

std::string to_lower(std::string_view utf8);
std::string trim(std::string_view s);

}  // namespace mfd::unicode
