#include "sbd/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "sbd/errors.hpp"
#include "sbd/utf8.hpp"

namespace sbd {

namespace {

void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
  write_u32_le(out, static_cast<std::uint32_t>(v));
  write_u32_le(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t read_u32_le(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(std::string("truncated while reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t read_u64_le(std::istream& in, const char* what) {
  const std::uint64_t lo = read_u32_le(in, what);
  const std::uint64_t hi = read_u32_le(in, what);
  return lo | (hi << 32);
}

float parse_float_strict(std::string_view text, std::size_t line_no) {
  float value = 0.0f;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw FormatError("vector file line " + std::to_string(line_no) +
                      ": bad float component '" + std::string(text) + "'");
  if (!std::isfinite(value))
    throw FormatError("vector file line " + std::to_string(line_no) +
                      ": non-finite component '" + std::string(text) + "'");
  return value;
}

void append_shortest_float(std::string& out, float v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

EmbeddingTable::EmbeddingTable(EmbeddingTable&& other) noexcept
    : dim(other.dim),
      vocab(std::move(other.vocab)),
      word_matrix(std::move(other.word_matrix)),
      ngram_matrix(std::move(other.ngram_matrix)),
      buckets(other.buckets),
      nmin(other.nmin),
      nmax(other.nmax),
      oov_count(other.oov_count.load()) {}

EmbeddingTable& EmbeddingTable::operator=(EmbeddingTable&& other) noexcept {
  dim = other.dim;
  vocab = std::move(other.vocab);
  word_matrix = std::move(other.word_matrix);
  ngram_matrix = std::move(other.ngram_matrix);
  buckets = other.buckets;
  nmin = other.nmin;
  nmax = other.nmax;
  oov_count.store(other.oov_count.load());
  return *this;
}

VectorParseResult parse_vector_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("vector file: empty stream, no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::uint64_t vocab_size = 0;
  std::uint64_t dim = 0;
  {
    const char* p = line.data();
    const char* end = p + line.size();
    auto r1 = std::from_chars(p, end, vocab_size);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ')
      throw FormatError("vector file: malformed header '" + line + "'");
    auto r2 = std::from_chars(r1.ptr + 1, end, dim);
    if (r2.ec != std::errc{} || r2.ptr != end)
      throw FormatError("vector file: malformed header '" + line + "'");
  }
  if (dim == 0) throw FormatError("vector file: dimension must be positive");

  VectorParseResult result;
  EmbeddingTable& table = result.table;
  table.dim = static_cast<std::size_t>(dim);
  table.vocab.reserve(static_cast<std::size_t>(vocab_size));
  table.word_matrix.reserve(static_cast<std::size_t>(vocab_size * dim));

  std::vector<std::string_view> fields;
  for (std::uint64_t row = 0; row < vocab_size; ++row) {
    const std::size_t line_no = static_cast<std::size_t>(row) + 2;
    if (!std::getline(in, line))
      throw FormatError("vector file: truncated after " + std::to_string(row) +
                        " of " + std::to_string(vocab_size) + " rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    fields.clear();
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      const char* start = p;
      while (p < end && *p != ' ') ++p;
      if (p > start) fields.emplace_back(start, static_cast<std::size_t>(p - start));
    }
    if (fields.size() != table.dim + 1)
      throw FormatError("vector file line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.dim) + " components, found " +
                        std::to_string(fields.empty() ? 0 : fields.size() - 1));

    const std::string word(fields[0]);
    auto [it, inserted] = table.vocab.try_emplace(word, table.vocab.size());
    float* dst;
    if (inserted) {
      table.word_matrix.resize(table.word_matrix.size() + table.dim);
      dst = table.word_matrix.data() + (table.word_matrix.size() - table.dim);
    } else {
      ++result.duplicate_words;  // last occurrence wins
      dst = table.word_matrix.data() + it->second * table.dim;
    }
    for (std::size_t d = 0; d < table.dim; ++d)
      dst[d] = parse_float_strict(fields[d + 1], line_no);
  }
  return result;
}

VectorParseResult load_vector_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vector file: " + path);
  return parse_vector_file(in);
}

void write_vector_file(const EmbeddingTable& table, std::ostream& out) {
  std::vector<const std::string*> words(table.vocab.size());
  for (const auto& [word, row] : table.vocab) words[row] = &word;

  std::string line = std::to_string(table.vocab.size());
  line.push_back(' ');
  line += std::to_string(table.dim);
  line.push_back('\n');
  out << line;

  for (std::size_t r = 0; r < words.size(); ++r) {
    line.clear();
    line += *words[r];
    const float* v = table.word_matrix.data() + r * table.dim;
    for (std::size_t d = 0; d < table.dim; ++d) {
      line.push_back(' ');
      append_shortest_float(line, v[d]);
    }
    line.push_back('\n');
    out << line;
  }
}

std::vector<std::string> extract_ngrams(std::string_view word, int nmin, int nmax) {
  if (word.empty()) throw ConfigError("extract_ngrams: empty word");
  if (nmin < 1) throw ConfigError("extract_ngrams: nmin must be >= 1");

  std::vector<char32_t> wrapped;
  wrapped.push_back(U'<');
  for (char32_t cp : utf8::decode(word)) wrapped.push_back(cp);
  wrapped.push_back(U'>');

  const int w = static_cast<int>(wrapped.size());
  const int top = std::min(nmax, w);
  std::vector<std::string> out;
  for (int len = nmin; len <= top; ++len) {
    for (int start = 0; start + len <= w; ++start) {
      std::string gram = utf8::encode(wrapped.data() + start, wrapped.data() + start + len);
      bool seen = false;
      for (const auto& g : out) {
        if (g == gram) {
          seen = true;
          break;
        }
      }
      if (!seen) out.push_back(std::move(gram));
    }
  }
  return out;
}

std::uint32_t fnv1a32(std::string_view bytes) {
  std::uint32_t h = 2166136261u;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 16777619u;
  }
  return h;
}

std::uint64_t hash_ngram(std::string_view ngram, std::uint64_t buckets) {
  return fnv1a32(ngram) % buckets;
}

void embed_word_into(const EmbeddingTable& table, std::string_view word, float* out) {
  const auto it = table.vocab.find(word);
  if (it != table.vocab.end()) {
    const auto row = table.row(it->second);
    std::copy(row.begin(), row.end(), out);
    return;
  }
  std::fill(out, out + table.dim, 0.0f);
  if (table.has_ngrams()) {
    for (const auto& gram : extract_ngrams(word, table.nmin, table.nmax)) {
      const auto row = table.ngram_row(
          static_cast<std::size_t>(hash_ngram(gram, table.buckets)));
      for (std::size_t d = 0; d < table.dim; ++d) out[d] += row[d];
    }
    return;
  }
  table.oov_count.fetch_add(1, std::memory_order_relaxed);
}

std::vector<float> embed_word(const EmbeddingTable& table, std::string_view word) {
  std::vector<float> vec(table.dim, 0.0f);
  embed_word_into(table, word, vec.data());
  return vec;
}

void embed_window(const EmbeddingTable& table, std::span<const std::string_view> words,
                  std::string_view pad_token, float* out) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    float* dst = out + i * table.dim;
    if (words[i] == pad_token) {
      std::fill(dst, dst + table.dim, 0.0f);
      continue;
    }
    embed_word_into(table, words[i], dst);
  }
}

void write_ngram_file(const EmbeddingTable& table, std::ostream& out) {
  if (!table.has_ngrams()) throw ConfigError("write_ngram_file: table has no n-gram matrix");
  out.write("NGRB", 4);
  write_u32_le(out, 1);
  write_u64_le(out, table.buckets);
  write_u32_le(out, static_cast<std::uint32_t>(table.dim));
  out.write(reinterpret_cast<const char*>(table.ngram_matrix.data()),
            static_cast<std::streamsize>(table.ngram_matrix.size() * sizeof(float)));
}

void read_ngram_file(EmbeddingTable& table, std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "NGRB", 4) != 0)
    throw FormatError("n-gram file: bad magic");
  const std::uint32_t version = read_u32_le(in, "n-gram file version");
  if (version != 1)
    throw FormatError("n-gram file: unsupported version " + std::to_string(version));
  const std::uint64_t buckets = read_u64_le(in, "n-gram bucket count");
  const std::uint32_t dim = read_u32_le(in, "n-gram dimension");
  if (buckets == 0) throw FormatError("n-gram file: zero buckets");
  if (dim != table.dim)
    throw FormatError("n-gram file dimension " + std::to_string(dim) +
                      " does not match table dimension " + std::to_string(table.dim));
  if (buckets > (1ull << 32) / dim)  // keeps buckets*dim inside size_t math
    throw FormatError("n-gram file: implausible bucket count " + std::to_string(buckets));
  std::vector<float> matrix(static_cast<std::size_t>(buckets) * dim);
  if (!in.read(reinterpret_cast<char*>(matrix.data()),
               static_cast<std::streamsize>(matrix.size() * sizeof(float)))) {
    throw FormatError("n-gram file: truncated payload, expected " +
                      std::to_string(matrix.size() * sizeof(float)) + " bytes, got " +
                      std::to_string(in.gcount()));
  }
  for (const float v : matrix)
    if (!std::isfinite(v)) throw FormatError("n-gram file: non-finite entry");
  table.buckets = buckets;
  table.ngram_matrix = std::move(matrix);
}

void load_ngram_file(EmbeddingTable& table, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open n-gram file: " + path);
  read_ngram_file(table, in);
}

}  // namespace sbd
