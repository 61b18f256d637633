#pragma once

#include <string>
#include <string_view>

namespace namelink {

// UTF-8 <-> code point conversion. Invalid byte sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

// Composes the common Latin letter + combining mark sequences into their
// precomposed forms. Covers the combining marks seen in registry-style name
// data (grave, acute, circumflex, tilde, diaeresis, ring, cedilla); anything
// outside the table is left untouched.
std::u32string compose_latin(std::u32string_view s);

// Locale-independent uppercase over ASCII, Latin-1 and Latin Extended-A.
std::u32string to_upper(std::u32string_view s);

// Canonical form used everywhere names are compared or stored: trim outer
// whitespace, collapse internal whitespace runs to a single space, compose,
// uppercase. Returns UTF-8.
std::string normalize_name(std::string_view raw);

bool is_ascii_alpha(char32_t c);
bool is_vowel(char32_t c);  // AEIOU after normalisation; Y counts as consonant

}  // namespace namelink
