#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbd::utf8 {

// Strict UTF-8 decoding: rejects overlong encodings, surrogates and
// codepoints above U+10FFFF. On error throws FormatError naming the byte
// offset (offset_base + position within `bytes`).
std::vector<char32_t> decode(std::string_view bytes, std::size_t offset_base = 0);

void append(std::u32string& out, char32_t cp) = delete;  // use encode/append_utf8
void append_utf8(std::string& out, char32_t cp);
std::string encode(const char32_t* begin, const char32_t* end);
std::string encode(const std::vector<char32_t>& cps);

// Lowercasing for the alphabets this toolkit meets in practice: ASCII,
// Latin-1 Supplement, Latin Extended-A, Greek and Cyrillic base ranges.
// Anything else passes through unchanged.
char32_t to_lower(char32_t cp);

bool is_space(char32_t cp);  // ASCII whitespace + NBSP family

}  // namespace sbd::utf8
