#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Designations and catalog texts mix Cyrillic and
// Latin, so everything that classifies characters works on code points.
namespace specforge::utf8 {

// Invalid sequences decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

bool is_digit(char32_t c);
bool is_latin(char32_t c);
bool is_cyrillic(char32_t c);
bool is_upper(char32_t c);
bool is_space(char32_t c);

// Simple case folding for Latin and Cyrillic letters; other code points unchanged.
char32_t fold(char32_t c);
std::string fold(std::string_view text);

std::string trim(std::string_view text);
std::vector<std::string> split_words(std::string_view text);

}  // namespace specforge::utf8
