#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sbd/metrics.hpp"
#include "sbd/models.hpp"
#include "sbd/normalizer.hpp"
#include "sbd/train.hpp"

namespace sbd::cli {

// Streaming file normalization: one forward pass, bounded memory per line.
NormalizedCorpus normalize_file(const std::string& path);

struct NormalizeResult {
  std::size_t tokens = 0;
  std::size_t markers = 0;
  double ratio = 0.0;  // 0 on an empty corpus
};
NormalizeResult cmd_normalize(const std::string& in_path, const std::string& out_path);

struct TrainOptions {
  std::string corpus_path;
  std::string vectors_path;
  std::string checkpoint_path;
  std::string loss_path;  // optional loss-curve output
  ModelId model = ModelId::CnnC;
  std::size_t window_m = 5;
  TrainConfig train;
};

struct TrainCmdResult {
  double final_loss = 0.0;  // last logged training loss (0 when epochs == 0)
  std::size_t steps = 0;
  std::size_t train_tokens = 0;
  std::size_t train_windows = 0;
};
TrainCmdResult cmd_train(const TrainOptions& opt);

struct EvaluateOptions {
  std::string corpus_path;
  std::string vectors_path;
  std::string checkpoint_path;
  std::string out_path;  // optional; report always goes to `out` stream too
  double alpha = 1.0;
};
MetricsReport cmd_evaluate(const EvaluateOptions& opt, std::ostream& out);

struct SegmentOptions {
  std::string in_path;
  std::string vectors_path;
  std::string checkpoint_path;
  std::string out_path;
  double alpha = 1.0;
  bool one_sentence_per_line = false;
};

struct SegmentResult {
  std::size_t words = 0;
  std::size_t boundaries = 0;
};
SegmentResult cmd_segment(const SegmentOptions& opt);

}  // namespace sbd::cli
