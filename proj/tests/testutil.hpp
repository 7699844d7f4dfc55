#pragma once

// Shared fixtures and generators for the test suites.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sbd/embeddings.hpp"
#include "sbd/normalizer.hpp"
#include "sbd/rng.hpp"
#include "sbd/tensor.hpp"
#include "sbd/utf8.hpp"

namespace sbd::test {

inline std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "sbd_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

// Unique-enough temp file path for a single test process.
inline std::string temp_file(const std::string& stem) {
  static std::atomic<unsigned> counter{0};
  return (temp_dir() / (stem + "." + std::to_string(::getpid()) + "." +
                        std::to_string(counter.fetch_add(1))))
      .string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Deterministic random embedding table over the given vocabulary.
inline EmbeddingTable random_table(std::size_t dim, const std::vector<std::string>& words,
                                   std::uint64_t seed, double scale = 0.5) {
  EmbeddingTable table;
  table.dim = dim;
  std::mt19937_64 rng(seed);
  for (const auto& w : words) {
    if (table.vocab.contains(w)) continue;
    table.vocab.emplace(w, table.vocab.size());
    for (std::size_t d = 0; d < dim; ++d)
      table.word_matrix.push_back(static_cast<float>(uniform_range(rng, -scale, scale)));
  }
  return table;
}

inline EmbeddingTable table_for_corpus(std::size_t dim, const NormalizedCorpus& corpus,
                                       std::uint64_t seed) {
  std::vector<std::string> words;
  for (const auto& t : corpus.tokens)
    if (!is_seg_token(t)) words.push_back(t);
  return random_table(dim, words, seed);
}

template <typename T>
TensorT<T> random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng,
                         double lo = -1.0, double hi = 1.0) {
  TensorT<T> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<T>(uniform_range(rng, lo, hi));
  return t;
}

// Independent FNV-1a oracle: 64-bit arithmetic with an explicit 32-bit mask
// instead of wrapping uint32 multiplication.
inline std::uint32_t fnv_oracle(std::string_view bytes) {
  std::uint64_t h = 2166136261ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h = (h * 16777619ull) & 0xFFFFFFFFull;
  }
  return static_cast<std::uint32_t>(h);
}

// Independent n-gram oracle working on UTF-8 byte offsets rather than a
// decoded codepoint buffer.
inline std::vector<std::string> ngram_oracle(const std::string& word, int nmin, int nmax) {
  const std::string wrapped = "<" + word + ">";
  std::vector<std::size_t> starts;  // byte offset of each scalar
  for (std::size_t i = 0; i < wrapped.size();) {
    starts.push_back(i);
    const auto b = static_cast<unsigned char>(wrapped[i]);
    i += b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : 4;
  }
  starts.push_back(wrapped.size());
  const int w = static_cast<int>(starts.size()) - 1;

  std::vector<std::string> out;
  for (int len = nmin; len <= std::min(nmax, w); ++len) {
    for (int s = 0; s + len <= w; ++s) {
      std::string gram = wrapped.substr(starts[static_cast<std::size_t>(s)],
                                        starts[static_cast<std::size_t>(s + len)] -
                                            starts[static_cast<std::size_t>(s)]);
      if (std::find(out.begin(), out.end(), gram) == out.end()) out.push_back(std::move(gram));
    }
  }
  return out;
}

inline std::string random_unicode_word(std::mt19937_64& rng) {
  static const std::vector<std::pair<char32_t, char32_t>> kRanges = {
      {U'a', U'z'}, {0x00E0, 0x00FF}, {0x0391, 0x03A1}, {0x0430, 0x044F},
      {0x4E00, 0x4E2F}, {0x1F600, 0x1F60F}};
  const std::size_t len = 1 + rng() % 10;
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    const auto& [lo, hi] = kRanges[rng() % kRanges.size()];
    utf8::append_utf8(out, lo + static_cast<char32_t>(rng() % (hi - lo + 1)));
  }
  return out;
}

// Synthetic separable corpus: every sentence ends with the sentinel word, so
// a window is SEG-labeled exactly when its center is the sentinel.
inline std::string sentinel_corpus_text(std::size_t sentences, std::uint64_t seed,
                                        const std::string& sentinel = "fin") {
  static const std::vector<std::string> kFillers = {
      "le", "chat", "chien", "homme", "femme", "ville", "jour", "nuit",  "eau",  "feu",
      "pain", "vin", "roi",  "mer",   "ciel",  "temps", "main", "coeur", "voix", "route"};
  std::mt19937_64 rng(seed);
  std::string text;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t len = 2 + rng() % 8;
    for (std::size_t i = 0; i < len; ++i) {
      text += kFillers[rng() % kFillers.size()];
      text.push_back(' ');
    }
    text += sentinel;
    text += ". ";
  }
  if (!text.empty()) text.back() = '\n';
  return text;
}

}  // namespace sbd::test
