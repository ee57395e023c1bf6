#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrlforge::unicode {

// Decodes UTF-8 into Unicode scalar values. Invalid bytes decode to U+FFFD.
std::vector<char32_t> decode(const std::string& utf8);

std::string encode(const std::vector<char32_t>& cps);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

// Canonical composition for the Latin combining sequences that occur in the
// supported language set (precomposes base + combining mark). Idempotent.
std::string nfc(const std::string& utf8);

// Strips leading/trailing Unicode whitespace.
std::string trim(const std::string& utf8);

}  // namespace lrlforge::unicode
