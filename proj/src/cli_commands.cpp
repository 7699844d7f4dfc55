#include "sbd/cli_commands.hpp"

#include <fstream>

#include "sbd/window.hpp"

namespace sbd::cli {

namespace {

constexpr double kSplitRatio = 0.8;  // 80% train / 20% test

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  return out;
}

EmbeddingTable load_vectors(const std::string& path) {
  return load_vector_file(path).table;
}

Model<float> load_model_for(const EmbeddingTable& table, const std::string& checkpoint_path) {
  Model<float> model = load_checkpoint(checkpoint_path);
  if (model.n() != table.dim)
    throw ConfigError("checkpoint expects " + std::to_string(model.n()) +
                      "-dimensional vectors but the vector file has dimension " +
                      std::to_string(table.dim));
  return model;
}

}  // namespace

NormalizedCorpus normalize_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  Normalizer norm;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    norm.feed_line(line, offset);
    offset += line.size() + 1;
  }
  if (in.bad()) throw IoError("read failure on " + path);
  return norm.take();
}

NormalizeResult cmd_normalize(const std::string& in_path, const std::string& out_path) {
  const NormalizedCorpus corpus = normalize_file(in_path);
  std::ofstream out = open_output(out_path);
  if (!corpus.empty()) {
    out << render(corpus) << '\n';
    if (!out) throw IoError("write failure on " + out_path);
  }
  NormalizeResult r;
  r.tokens = corpus.size();
  r.markers = corpus.marker_count();
  r.ratio = corpus.empty() ? 0.0 : punctuation_ratio(corpus);
  return r;
}

TrainCmdResult cmd_train(const TrainOptions& opt) {
  const NormalizedCorpus corpus = normalize_file(opt.corpus_path);
  const EmbeddingTable table = load_vectors(opt.vectors_path);

  const SplitCorpus split = split_corpus(corpus, kSplitRatio);
  const LabeledSequence seq = label_tokens(split.train);
  WindowConfig wcfg;
  wcfg.m = opt.window_m;
  wcfg.n = table.dim;
  const std::vector<WindowSample> samples = build_windows(seq, wcfg);
  if (samples.empty()) throw ConfigError("training corpus has no words after normalization");

  Model<float> model = build_model(opt.model, wcfg.m, wcfg.n,
                                   static_cast<float>(opt.train.keep_p));
  model.init_params(opt.train.seed);

  const TrainResult result = train(model, seq, wcfg, samples, table, opt.train);

  save_checkpoint(model, opt.checkpoint_path);
  if (!opt.loss_path.empty()) {
    std::ofstream out = open_output(opt.loss_path);
    write_loss_curve(result.curve, out);
  }

  TrainCmdResult r;
  r.final_loss = result.curve.empty() ? 0.0 : result.curve.back().loss;
  r.steps = result.curve.empty() ? 0 : result.curve.back().step;
  r.train_tokens = split.train.size();
  r.train_windows = samples.size();
  return r;
}

MetricsReport cmd_evaluate(const EvaluateOptions& opt, std::ostream& out) {
  const NormalizedCorpus corpus = normalize_file(opt.corpus_path);
  const EmbeddingTable table = load_vectors(opt.vectors_path);
  Model<float> model = load_model_for(table, opt.checkpoint_path);

  const SplitCorpus split = split_corpus(corpus, kSplitRatio);
  const LabeledSequence seq = label_tokens(split.test);
  WindowConfig wcfg;
  wcfg.m = model.m();
  wcfg.n = model.n();
  const std::vector<WindowSample> samples = build_windows(seq, wcfg);
  if (samples.empty()) throw ConfigError("test split has no words after normalization");

  const MetricsReport report = evaluate(model, seq, wcfg, samples, table, opt.alpha);
  write_metrics(report, out);
  if (!opt.out_path.empty()) {
    std::ofstream file = open_output(opt.out_path);
    write_metrics(report, file);
  }
  return report;
}

SegmentResult cmd_segment(const SegmentOptions& opt) {
  const NormalizedCorpus corpus = normalize_file(opt.in_path);
  const EmbeddingTable table = load_vectors(opt.vectors_path);
  Model<float> model = load_model_for(table, opt.checkpoint_path);

  // Existing punctuation was already folded into markers by normalization;
  // predictions are made over the bare word stream.
  const LabeledSequence seq = label_tokens(corpus);
  WindowConfig wcfg;
  wcfg.m = model.m();
  wcfg.n = model.n();

  SegmentResult r;
  r.words = seq.size();
  if (seq.size() == 0) {
    open_output(opt.out_path);  // an empty document yields an empty file
    return r;
  }

  std::vector<bool> fires(seq.size(), false);
  constexpr std::size_t kBatch = 256;
  Tensor input;
  for (std::size_t start = 0; start < seq.size(); start += kBatch) {
    const std::size_t take = std::min(kBatch, seq.size() - start);
    input = Tensor({take, 1, wcfg.m, wcfg.n});
    for (std::size_t b = 0; b < take; ++b)
      fill_window_matrix(seq, wcfg, table, start + b, input.data.data() + b * wcfg.m * wcfg.n);
    const auto predictions = predict_batch(model, input, opt.alpha);
    for (std::size_t b = 0; b < take; ++b)
      if (predictions[b].label == Label::Seg) fires[start + b] = true;
  }
  std::ofstream out = open_output(opt.out_path);

  std::string text;
  bool line_start = true;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!line_start) text.push_back(' ');
    text += seq.words[i];
    line_start = false;
    if (fires[i]) {
      ++r.boundaries;
      if (opt.one_sentence_per_line) {
        text.push_back('\n');
        line_start = true;
      } else {
        text.push_back(' ');
        text += kSegMarker;
      }
    }
  }
  if (!line_start || !opt.one_sentence_per_line) text.push_back('\n');
  out << text;
  if (!out) throw IoError("write failure on " + opt.out_path);
  return r;
}

}  // namespace sbd::cli
