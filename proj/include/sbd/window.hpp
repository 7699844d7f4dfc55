#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbd/embeddings.hpp"
#include "sbd/label.hpp"
#include "sbd/normalizer.hpp"
#include "sbd/tensor.hpp"

namespace sbd {

// Words with markers stripped; labels[i] == Seg iff word i immediately
// preceded a <SEG> marker in the source corpus.
struct LabeledSequence {
  std::vector<std::string> words;
  std::vector<Label> labels;

  std::size_t size() const { return words.size(); }
};

struct WindowConfig {
  std::size_t m = 5;  // window width, odd
  std::size_t n = 300;
  std::string pad_token = "<PAD>";

  std::size_t half() const { return (m - 1) / 2; }
  void validate() const;
};

// One window sample. The word window and its m x n matrix are rebuilt on
// demand from the sequence (windows are never stored densely).
struct WindowSample {
  std::size_t center_index = 0;
  Label label = Label::NoSeg;
};

LabeledSequence label_tokens(const NormalizedCorpus& corpus);

// One sample per word; the label is the center word's label.
std::vector<WindowSample> build_windows(const LabeledSequence& seq, const WindowConfig& cfg);

// The m words centered on `center`, with pad tokens past either edge.
// Views point into seq.words and cfg.pad_token.
std::vector<std::string_view> assemble_window(const LabeledSequence& seq,
                                              const WindowConfig& cfg, std::size_t center);

// Fills `out` (m*n floats, row-major) with the window matrix for `center`.
void fill_window_matrix(const LabeledSequence& seq, const WindowConfig& cfg,
                        const EmbeddingTable& table, std::size_t center, float* out);

struct Batch {
  Tensor input;                            // B x 1 x m x n
  std::vector<Label> labels;               // B
  std::vector<std::size_t> sample_indices; // positions in the sample list
};

// Deterministic shuffled minibatches: Fisher-Yates order drawn from a
// seed-keyed PRNG, matrices filled via the embedding table on demand, final
// partial batch emitted.
class BatchStream {
 public:
  BatchStream(const LabeledSequence& seq, const WindowConfig& cfg,
              std::span<const WindowSample> samples, std::size_t batch_size,
              std::uint64_t seed, const EmbeddingTable& table);

  std::optional<Batch> next();

  const std::vector<std::size_t>& order() const { return order_; }

 private:
  const LabeledSequence& seq_;
  WindowConfig cfg_;
  std::span<const WindowSample> samples_;
  std::size_t batch_size_;
  const EmbeddingTable& table_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

// The seed-keyed permutation used by BatchStream, exposed for tests.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed);

// Manifest cache format: one line per sample, "center<TAB>label", label 1 = SEG.
void write_manifest(std::span<const WindowSample> samples, std::ostream& out);
std::vector<WindowSample> read_manifest(std::istream& in);

}  // namespace sbd
