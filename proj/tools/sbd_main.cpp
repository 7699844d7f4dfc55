// Command-line front end: normalize / train / evaluate / segment.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sbd/cli_commands.hpp"
#include "sbd/errors.hpp"

namespace {

struct SharedFlags {
  std::string vectors;
  std::string checkpoint;
  std::string out;
  std::string model = "cnn-c";
  std::size_t window = 5;
  double alpha = 1.0;
  std::uint64_t seed = 42;
  std::size_t batch = 256;
  std::size_t epochs = 5;
  double lr = 1e-3;
  double keep_prob = 0.5;
  std::size_t log_interval = 50;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence boundary detection for French text"};
  app.require_subcommand(1);

  SharedFlags flags;
  std::string input;
  bool one_sentence_per_line = false;

  auto* normalize = app.add_subcommand("normalize", "Normalize raw text to a <SEG> token stream");
  normalize->add_option("input", input, "raw UTF-8 text file")->required();
  normalize->add_option("--out", flags.out, "output token file")->required();

  auto* train = app.add_subcommand("train", "Train a model on the 80% split of a corpus");
  train->add_option("input", input, "corpus file (raw text; normalized on the fly)")->required();
  train->add_option("--vectors", flags.vectors, "word vector file")->required();
  train->add_option("--model", flags.model, "cnn-a | cnn-b | cnn-c");
  train->add_option("--window", flags.window, "window width m (odd)");
  train->add_option("--checkpoint", flags.checkpoint, "checkpoint output path")->required();
  train->add_option("--out", flags.out, "loss curve output path (step<TAB>loss)");
  train->add_option("--seed", flags.seed, "PRNG seed for init/shuffle/dropout");
  train->add_option("--batch", flags.batch, "batch size");
  train->add_option("--epochs", flags.epochs, "training epochs");
  train->add_option("--lr", flags.lr, "learning rate");
  train->add_option("--keep-prob", flags.keep_prob, "dropout keep probability");
  train->add_option("--log-interval", flags.log_interval, "steps between loss log points");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on the 20% test split");
  evaluate->add_option("input", input, "corpus file")->required();
  evaluate->add_option("--vectors", flags.vectors, "word vector file")->required();
  evaluate->add_option("--checkpoint", flags.checkpoint, "checkpoint path")->required();
  evaluate->add_option("--alpha", flags.alpha, "NO_SEG softmax rescaling factor in (0,1]");
  evaluate->add_option("--out", flags.out, "also write the report to this file");

  auto* segment = app.add_subcommand("segment", "Insert <SEG> boundaries into a raw transcript");
  segment->add_option("input", input, "raw transcript file")->required();
  segment->add_option("--vectors", flags.vectors, "word vector file")->required();
  segment->add_option("--checkpoint", flags.checkpoint, "checkpoint path")->required();
  segment->add_option("--alpha", flags.alpha, "NO_SEG softmax rescaling factor in (0,1]");
  segment->add_option("--out", flags.out, "output path")->required();
  segment->add_flag("--one-sentence-per-line", one_sentence_per_line,
                    "emit one predicted sentence per line instead of <SEG> markers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag/usage problems share the config exit code
  }

  try {
    if (normalize->parsed()) {
      const auto r = sbd::cli::cmd_normalize(input, flags.out);
      std::fprintf(stderr, "tokens=%zu markers=%zu ratio=%.6f\n", r.tokens, r.markers, r.ratio);
    } else if (train->parsed()) {
      sbd::cli::TrainOptions opt;
      opt.corpus_path = input;
      opt.vectors_path = flags.vectors;
      opt.checkpoint_path = flags.checkpoint;
      opt.loss_path = flags.out;
      opt.model = sbd::model_id_from_name(flags.model);
      opt.window_m = flags.window;
      opt.train.batch_size = flags.batch;
      opt.train.epochs = flags.epochs;
      opt.train.lr = flags.lr;
      opt.train.keep_p = flags.keep_prob;
      opt.train.seed = flags.seed;
      opt.train.log_interval = flags.log_interval;
      const auto r = sbd::cli::cmd_train(opt);
      std::fprintf(stderr, "train_tokens=%zu windows=%zu steps=%zu final_loss=%.6f\n",
                   r.train_tokens, r.train_windows, r.steps, r.final_loss);
    } else if (evaluate->parsed()) {
      sbd::cli::EvaluateOptions opt;
      opt.corpus_path = input;
      opt.vectors_path = flags.vectors;
      opt.checkpoint_path = flags.checkpoint;
      opt.out_path = flags.out;
      opt.alpha = flags.alpha;
      sbd::cli::cmd_evaluate(opt, std::cout);
    } else if (segment->parsed()) {
      sbd::cli::SegmentOptions opt;
      opt.in_path = input;
      opt.vectors_path = flags.vectors;
      opt.checkpoint_path = flags.checkpoint;
      opt.out_path = flags.out;
      opt.alpha = flags.alpha;
      opt.one_sentence_per_line = one_sentence_per_line;
      const auto r = sbd::cli::cmd_segment(opt);
      std::fprintf(stderr, "words=%zu boundaries=%zu\n", r.words, r.boundaries);
    }
  } catch (const sbd::SbdError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return sbd::exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
