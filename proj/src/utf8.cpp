#include "sbd/utf8.hpp"

#include <cstdio>

#include "sbd/errors.hpp"

namespace sbd::utf8 {

namespace {

[[noreturn]] void bad_byte(std::size_t offset) {
  throw FormatError("invalid UTF-8 at byte offset " + std::to_string(offset));
}

}  // namespace

std::vector<char32_t> decode(std::string_view bytes, std::size_t offset_base) {
  std::vector<char32_t> out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  while (i < n) {
    const unsigned char b0 = p[i];
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      bad_byte(offset_base + i);
    }
    if (i + static_cast<std::size_t>(len) > n) bad_byte(offset_base + i);
    for (int k = 1; k < len; ++k) {
      const unsigned char bk = p[i + static_cast<std::size_t>(k)];
      if ((bk & 0xC0) != 0x80) bad_byte(offset_base + i + static_cast<std::size_t>(k));
      cp = (cp << 6) | (bk & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len]) bad_byte(offset_base + i);                  // overlong
    if (cp >= 0xD800 && cp <= 0xDFFF) bad_byte(offset_base + i);    // surrogate
    if (cp > 0x10FFFF) bad_byte(offset_base + i);
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(const char32_t* begin, const char32_t* end) {
  std::string out;
  out.reserve(static_cast<std::size_t>(end - begin));
  for (const char32_t* p = begin; p != end; ++p) append_utf8(out, *p);
  return out;
}

std::string encode(const std::vector<char32_t>& cps) {
  return encode(cps.data(), cps.data() + cps.size());
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  // Latin-1 Supplement uppercase, minus the multiplication sign U+00D7.
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  // Latin Extended-A: mostly upper/lower pairs at even/odd codepoints.
  if (cp >= 0x0100 && cp <= 0x0137 && (cp % 2) == 0) return cp + 1;
  if (cp >= 0x0139 && cp <= 0x0148 && (cp % 2) == 1) return cp + 1;
  if (cp >= 0x014A && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
  if (cp == 0x0178) return 0x00FF;  // Y with diaeresis
  if (cp >= 0x0179 && cp <= 0x017E && (cp % 2) == 1) return cp + 1;
  // Greek capitals (skipping the reserved gap at U+03A2).
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;
  // Cyrillic.
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  return cp;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:  // no-break space (French spacing before ?!;:)
    case 0x2009:  // thin space
    case 0x202F:  // narrow no-break space
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;  // en/em/figure/punctuation spaces
  }
}

}  // namespace sbd::utf8
