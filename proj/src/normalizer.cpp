#include "sbd/normalizer.hpp"

#include <algorithm>
#include <cmath>

#include "sbd/errors.hpp"
#include "sbd/utf8.hpp"

namespace sbd {

namespace {

// Internal stand-in for a marker inside the character pipeline. Raw input
// containing this private-use codepoint is turned into a space up front so
// markers can only come from the rules themselves.
constexpr char32_t kMarkerChar = 0xE000;

bool is_boundary(char32_t cp) {
  return cp == U'?' || cp == U'!' || cp == U';' || cp == U':' || cp == U'.';
}

bool is_dash(char32_t cp) {
  return cp == U'-' || (cp >= 0x2010 && cp <= 0x2015);
}

// Punctuation that survives to step 6 and is deleted there: everything
// punctuation-like that is neither a boundary mark nor an apostrophe.
bool is_deletable(char32_t cp) {
  switch (cp) {
    case U'"': case U'#': case U'$': case U'%': case U'&': case U'(':
    case U')': case U'*': case U'+': case U',': case U'/': case U'<':
    case U'=': case U'>': case U'@': case U'[': case U'\\': case U']':
    case U'^': case U'_': case U'`': case U'{': case U'|': case U'}':
    case U'~':
    case 0x00A1:  // inverted exclamation
    case 0x00A6: case 0x00A7: case 0x00A9: case 0x00AB: case 0x00AC:
    case 0x00AE: case 0x00B0: case 0x00B1: case 0x00B4: case 0x00B6:
    case 0x00B7: case 0x00B8: case 0x00BB: case 0x00BF:
    case 0x2018: case 0x201A: case 0x201B: case 0x201C: case 0x201D:
    case 0x201E: case 0x201F:
    case 0x2022:  // bullet
    case 0x2026:  // ellipsis leftovers
    case 0x2030: case 0x2032: case 0x2033: case 0x2039: case 0x203A:
    case 0x20AC:  // euro sign
    case 0x2116:
      return true;
    default:
      return cp >= 0x00A2 && cp <= 0x00A5;  // currency signs
  }
}

bool is_collapsible_punct(char32_t cp) {
  return is_boundary(cp) || is_deletable(cp) || cp == U'\'';
}

// Step 1a: XML tag spans removed (replaced by a space so adjacent text does
// not merge). An exact "<SEG>" span is the marker literal, preserved as such.
// A '<' with no '>' before end of line stays a literal character.
void strip_tags(const std::vector<char32_t>& in, std::vector<char32_t>& out) {
  const std::size_t n = in.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = in[i];
    if (c == kMarkerChar) {
      out.push_back(U' ');
      ++i;
      continue;
    }
    if (c == U'<') {
      std::size_t close = i + 1;
      while (close < n && in[close] != U'>') ++close;
      if (close < n) {
        const bool is_seg = (close - i == 4) && in[i + 1] == U'S' &&
                            in[i + 2] == U'E' && in[i + 3] == U'G';
        out.push_back(is_seg ? kMarkerChar : U' ');
        i = close + 1;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
}

// Step 1b: dashes to spaces, soft hyphens removed, the five basic XML
// entities decoded, typographic apostrophes unified with U+0027.
void map_chars(const std::vector<char32_t>& in, std::vector<char32_t>& out) {
  static constexpr struct {
    std::u32string_view name;
    char32_t value;
  } kEntities[] = {
      {U"&amp;", U'&'}, {U"&lt;", U'<'}, {U"&gt;", U'>'},
      {U"&quot;", U'"'}, {U"&apos;", U'\''},
  };
  const std::size_t n = in.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = in[i];
    if (c == U'&') {
      bool matched = false;
      for (const auto& e : kEntities) {
        const std::size_t len = e.name.size();
        if (i + len <= n &&
            std::equal(e.name.begin(), e.name.end(), in.begin() + static_cast<std::ptrdiff_t>(i))) {
          out.push_back(e.value);
          i += len;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (is_dash(c)) {
      out.push_back(U' ');
    } else if (c == 0x00AD) {
      // soft hyphen: drop
    } else if (c == 0x2019) {
      out.push_back(U'\'');
    } else {
      out.push_back(c);
    }
    ++i;
  }
}

}  // namespace

std::size_t NormalizedCorpus::marker_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(),
                    [](const std::string& t) { return is_seg_token(t); }));
}

void Normalizer::feed_line(std::string_view line, std::size_t offset_base) {
  const std::vector<char32_t> raw = utf8::decode(line, offset_base);

  std::vector<char32_t> a;
  a.reserve(raw.size());
  strip_tags(raw, a);

  std::vector<char32_t> b;
  b.reserve(a.size());
  map_chars(a, b);

  for (char32_t& c : b) c = utf8::to_lower(c);

  // Step 3: collapse runs of the same punctuation mark.
  std::vector<char32_t> c;
  c.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i > 0 && b[i] == b[i - 1] && is_collapsible_punct(b[i])) continue;
    c.push_back(b[i]);
  }

  // Steps 4-7 in one scan: apostrophe isolation, marker substitution,
  // punctuation deletion, whitespace tokenization.
  std::string word;
  auto flush_word = [&] {
    if (word.empty()) return;
    tokens_.push_back(std::move(word));
    word.clear();
    last_was_marker_ = false;
  };
  auto emit_marker = [&] {
    flush_word();
    if (last_was_marker_) return;
    tokens_.emplace_back(kSegMarker);
    last_was_marker_ = true;
  };
  for (const char32_t cp : c) {
    if (cp == kMarkerChar || is_boundary(cp)) {
      emit_marker();
    } else if (utf8::is_space(cp)) {
      flush_word();
    } else if (is_deletable(cp)) {
      // step 6
    } else if (cp == U'\'') {
      utf8::append_utf8(word, cp);
      flush_word();  // step 4: break after the apostrophe
    } else {
      utf8::append_utf8(word, cp);
    }
  }
  flush_word();
}

NormalizedCorpus Normalizer::take() {
  NormalizedCorpus out;
  out.tokens = std::move(tokens_);
  tokens_.clear();
  last_was_marker_ = true;
  return out;
}

NormalizedCorpus normalize(std::string_view raw) {
  Normalizer norm;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) {
      norm.feed_line(raw.substr(pos), pos);
      break;
    }
    norm.feed_line(raw.substr(pos, nl - pos), pos);
    pos = nl + 1;
  }
  return norm.take();
}

std::string render(const NormalizedCorpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += corpus.tokens[i];
  }
  return out;
}

std::size_t split_point(std::size_t n_tokens, double ratio) {
  const double exact = ratio * static_cast<double>(n_tokens);
  auto train = static_cast<std::size_t>(std::floor(exact + 0.5));
  train = std::max<std::size_t>(1, std::min(train, n_tokens - 1));
  return train;
}

SplitCorpus split_corpus(const NormalizedCorpus& corpus, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("split ratio must be in (0,1), got " + std::to_string(ratio));
  if (corpus.size() < 2)
    throw ConfigError("cannot split a corpus of " + std::to_string(corpus.size()) +
                      " token(s); need at least 2");
  const std::size_t cut = split_point(corpus.size(), ratio);
  SplitCorpus out;
  out.ratio = ratio;
  out.train.tokens.assign(corpus.tokens.begin(),
                          corpus.tokens.begin() + static_cast<std::ptrdiff_t>(cut));
  out.test.tokens.assign(corpus.tokens.begin() + static_cast<std::ptrdiff_t>(cut),
                         corpus.tokens.end());
  return out;
}

double punctuation_ratio(const NormalizedCorpus& corpus) {
  if (corpus.empty()) throw ConfigError("punctuation ratio of an empty corpus");
  return static_cast<double>(corpus.marker_count()) /
         static_cast<double>(corpus.size());
}

}  // namespace sbd
