#include "sbd/window.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <random>

#include "sbd/errors.hpp"

namespace sbd {

void WindowConfig::validate() const {
  if (m == 0 || m % 2 == 0)
    throw ConfigError("window width must be odd and positive, got " + std::to_string(m));
  if (n == 0) throw ConfigError("embedding dimension must be positive");
  if (pad_token.empty() || is_seg_token(pad_token))
    throw ConfigError("invalid pad token");
}

LabeledSequence label_tokens(const NormalizedCorpus& corpus) {
  LabeledSequence seq;
  seq.words.reserve(corpus.size());
  seq.labels.reserve(corpus.size());
  for (const std::string& token : corpus.tokens) {
    if (is_seg_token(token)) {
      // The marker labels the word before it; normalization guarantees one
      // exists except for an (ignored) marker-only corpus.
      if (!seq.labels.empty()) seq.labels.back() = Label::Seg;
    } else {
      seq.words.push_back(token);
      seq.labels.push_back(Label::NoSeg);
    }
  }
  return seq;
}

std::vector<WindowSample> build_windows(const LabeledSequence& seq, const WindowConfig& cfg) {
  cfg.validate();
  std::vector<WindowSample> samples(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) samples[i] = {i, seq.labels[i]};
  return samples;
}

std::vector<std::string_view> assemble_window(const LabeledSequence& seq,
                                              const WindowConfig& cfg, std::size_t center) {
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(cfg.half());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(seq.size());
  std::vector<std::string_view> out;
  out.reserve(cfg.m);
  for (std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(center) - half;
       pos <= static_cast<std::ptrdiff_t>(center) + half; ++pos) {
    if (pos < 0 || pos >= n)
      out.emplace_back(cfg.pad_token);
    else
      out.emplace_back(seq.words[static_cast<std::size_t>(pos)]);
  }
  return out;
}

void fill_window_matrix(const LabeledSequence& seq, const WindowConfig& cfg,
                        const EmbeddingTable& table, std::size_t center, float* out) {
  const auto words = assemble_window(seq, cfg, center);
  embed_window(table, words, cfg.pad_token, out);
}

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Hand-rolled Fisher-Yates: same permutation on every platform.
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

BatchStream::BatchStream(const LabeledSequence& seq, const WindowConfig& cfg,
                         std::span<const WindowSample> samples, std::size_t batch_size,
                         std::uint64_t seed, const EmbeddingTable& table)
    : seq_(seq), cfg_(cfg), samples_(samples), batch_size_(batch_size), table_(table) {
  cfg_.validate();
  if (batch_size_ == 0) throw ConfigError("batch size must be >= 1");
  if (table.dim != cfg_.n)
    throw ConfigError("embedding dimension " + std::to_string(table.dim) +
                      " does not match window config n=" + std::to_string(cfg_.n));
  order_ = shuffled_indices(samples.size(), seed);
}

std::optional<Batch> BatchStream::next() {
  if (pos_ >= order_.size()) return std::nullopt;
  const std::size_t take = std::min(batch_size_, order_.size() - pos_);
  Batch batch;
  batch.input = Tensor({take, 1, cfg_.m, cfg_.n});
  batch.labels.resize(take);
  batch.sample_indices.resize(take);
  for (std::size_t b = 0; b < take; ++b) {
    const std::size_t idx = order_[pos_ + b];
    const WindowSample& s = samples_[idx];
    fill_window_matrix(seq_, cfg_, table_, s.center_index,
                       batch.input.data.data() + b * cfg_.m * cfg_.n);
    batch.labels[b] = s.label;
    batch.sample_indices[b] = idx;
  }
  pos_ += take;
  return batch;
}

void write_manifest(std::span<const WindowSample> samples, std::ostream& out) {
  std::string line;
  for (const WindowSample& s : samples) {
    line = std::to_string(s.center_index);
    line.push_back('\t');
    line.push_back(s.label == Label::Seg ? '1' : '0');
    line.push_back('\n');
    out << line;
  }
}

std::vector<WindowSample> read_manifest(std::istream& in) {
  std::vector<WindowSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("manifest line " + std::to_string(line_no) + ": missing tab");
    std::size_t center = 0;
    const auto r = std::from_chars(line.data(), line.data() + tab, center);
    if (r.ec != std::errc{} || r.ptr != line.data() + tab)
      throw FormatError("manifest line " + std::to_string(line_no) + ": bad center index");
    if (tab + 2 != line.size() || (line[tab + 1] != '0' && line[tab + 1] != '1'))
      throw FormatError("manifest line " + std::to_string(line_no) + ": label must be 0 or 1");
    samples.push_back({center, line[tab + 1] == '1' ? Label::Seg : Label::NoSeg});
  }
  return samples;
}

}  // namespace sbd
