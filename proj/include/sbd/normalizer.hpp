#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbd {

// The sentence-boundary marker token. Normalized corpora store it verbatim;
// normalization guarantees no ordinary word ever equals this string.
inline constexpr std::string_view kSegMarker = "<SEG>";

inline bool is_seg_token(std::string_view token) { return token == kSegMarker; }

// A normalized token stream: lowercase words and "<SEG>" markers, never two
// markers in a row, never a leading marker.
struct NormalizedCorpus {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::size_t marker_count() const;
};

struct SplitCorpus {
  NormalizedCorpus train;
  NormalizedCorpus test;
  double ratio = 0.8;
};

// Streaming normalizer. Feed one line at a time; marker collapsing and the
// leading-marker drop carry across lines, so feeding a document line by line
// is equivalent to normalizing it whole. XML tags never span lines.
//
// Rules, applied per line in this order:
//   1. XML tag spans `<...>` removed (a literal "<SEG>" becomes a marker,
//      never a tag); hyphens and dashes replaced by a space; the five basic
//      entities &amp; &lt; &gt; &quot; &apos; decoded.
//   2. Lowercasing.
//   3. Runs of the same punctuation mark collapsed to one occurrence.
//   4. A space inserted after every apostrophe (clitic isolation).
//   5. Each of { ? ! ; : . } becomes a standalone <SEG> marker.
//   6. All other punctuation deleted.
//   7. Whitespace tokenization.
//   8. Consecutive markers collapsed; a corpus-initial marker dropped.
class Normalizer {
 public:
  // offset_base: byte offset of the line start within the whole stream, used
  // for UTF-8 error reporting.
  void feed_line(std::string_view line, std::size_t offset_base = 0);

  // Consumes the accumulated tokens.
  NormalizedCorpus take();

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  bool last_was_marker_ = true;  // starts true so a leading marker is dropped
};

// Whole-buffer normalization (newlines are ordinary whitespace).
NormalizedCorpus normalize(std::string_view raw);

// Inverse of tokenization for display/storage: tokens joined by single
// spaces. Empty corpus renders as an empty string; otherwise no trailing
// newline is added here (writers append one per document).
std::string render(const NormalizedCorpus& corpus);

// Number of tokens in the train part for an n-token corpus: ratio*n rounded
// half-up, clamped so both parts stay non-empty.
std::size_t split_point(std::size_t n_tokens, double ratio);

// Contiguous prefix split; requires at least 2 tokens and 0 < ratio < 1.
SplitCorpus split_corpus(const NormalizedCorpus& corpus, double ratio);

// marker tokens / all tokens; errors on an empty corpus.
double punctuation_ratio(const NormalizedCorpus& corpus);

}  // namespace sbd
