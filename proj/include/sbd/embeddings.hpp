#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbd {

struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Word vectors plus an optional character-n-gram bucket table for
// out-of-vocabulary composition. Immutable after construction; safe to share
// across threads (the OOV counter is atomic).
struct EmbeddingTable {
  using VocabMap =
      std::unordered_map<std::string, std::size_t, TransparentStringHash, std::equal_to<>>;

  std::size_t dim = 0;
  VocabMap vocab;  // word -> row
  std::vector<float> word_matrix;                      // |vocab| x dim
  std::vector<float> ngram_matrix;                     // buckets x dim, empty if absent
  std::uint64_t buckets = 2'000'000;
  int nmin = 3;
  int nmax = 6;
  mutable std::atomic<std::uint64_t> oov_count{0};  // zero-fallback lookups

  EmbeddingTable() = default;
  EmbeddingTable(EmbeddingTable&& other) noexcept;
  EmbeddingTable& operator=(EmbeddingTable&& other) noexcept;
  EmbeddingTable(const EmbeddingTable&) = delete;
  EmbeddingTable& operator=(const EmbeddingTable&) = delete;

  bool has_ngrams() const { return !ngram_matrix.empty(); }
  std::span<const float> row(std::size_t r) const {
    return {word_matrix.data() + r * dim, dim};
  }
  std::span<const float> ngram_row(std::size_t r) const {
    return {ngram_matrix.data() + r * dim, dim};
  }
};

struct VectorParseResult {
  EmbeddingTable table;
  std::size_t duplicate_words = 0;  // later occurrences overwrote earlier rows
};

// Text interchange format: header "V D", then V lines "word c1 ... cD".
VectorParseResult parse_vector_file(std::istream& in);
VectorParseResult load_vector_file(const std::string& path);

// Serializes with shortest round-trip float formatting, so parsing the
// output reproduces the table bit-for-bit. Vocabulary rows are written in
// row-index order.
void write_vector_file(const EmbeddingTable& table, std::ostream& out);

// All character n-grams of "<word>" (angle wrapping over Unicode scalars)
// with lengths in [nmin, min(nmax, wrapped length)], ordered by length then
// position, duplicates removed.
std::vector<std::string> extract_ngrams(std::string_view word, int nmin, int nmax);

// FNV-1a over the UTF-8 bytes.
std::uint32_t fnv1a32(std::string_view bytes);
std::uint64_t hash_ngram(std::string_view ngram, std::uint64_t buckets);

// Vocabulary row when known; otherwise the sum of hashed n-gram rows when a
// bucket table is present; otherwise zeros (counted in table.oov_count).
std::vector<float> embed_word(const EmbeddingTable& table, std::string_view word);
void embed_word_into(const EmbeddingTable& table, std::string_view word, float* out);

// Writes word i's vector into out[i*dim .. (i+1)*dim). The pad token maps to
// the zero vector. `out` must hold words.size()*dim floats.
void embed_window(const EmbeddingTable& table, std::span<const std::string_view> words,
                  std::string_view pad_token, float* out);

// Optional binary n-gram bucket file: magic "NGRB", version u32 LE,
// buckets u64 LE, dim u32 LE, then buckets*dim float32 LE row-major.
void write_ngram_file(const EmbeddingTable& table, std::ostream& out);
void read_ngram_file(EmbeddingTable& table, std::istream& in);        // dim must match
void load_ngram_file(EmbeddingTable& table, const std::string& path);

}  // namespace sbd
