#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "sbd/train.hpp"
#include "testutil.hpp"

using namespace sbd;

namespace {

struct Fixture {
  NormalizedCorpus corpus;
  LabeledSequence seq;
  WindowConfig cfg;
  std::vector<WindowSample> samples;
  EmbeddingTable table;
};

// Sentinel-separable toy task at n = 6.
Fixture sentinel_fixture(std::size_t sentences, std::uint64_t seed) {
  Fixture f;
  f.corpus = normalize(test::sentinel_corpus_text(sentences, seed));
  f.seq = label_tokens(f.corpus);
  f.cfg.m = 5;
  f.cfg.n = 6;
  f.samples = build_windows(f.seq, f.cfg);
  f.table = test::table_for_corpus(6, f.corpus, seed ^ 0xabc);
  return f;
}

// Small stack that can learn the sentinel task quickly.
Model<float> mini_model(std::size_t m, std::size_t n, float keep_p = 1.0f) {
  return Model<float>(ModelId::CnnC, m, n,
                      {LayerConfig::conv(8, 2, 2), LayerConfig::relu(),
                       LayerConfig::pool(2, 2, 1, 2), LayerConfig::flatten(),
                       LayerConfig::dense(32), LayerConfig::relu(),
                       LayerConfig::dropout(keep_p), LayerConfig::dense(2)});
}

// Labels follow the sign of the single input component.
Model<float> sign_model() {
  Model<float> model(ModelId::CnnC, 1, 1, {LayerConfig::flatten(), LayerConfig::dense(2)});
  auto params = model.parameters();
  params[0]->data = {-5.0f, 5.0f};
  params[1]->fill(0.0f);
  return model;
}

std::vector<TensorT<float>> snapshot(Model<float>& model) {
  std::vector<TensorT<float>> out;
  for (auto* p : model.parameters()) out.push_back(*p);
  return out;
}

}  // namespace

TEST_CASE("metric formulas: trivial examples") {
  Confusion c;
  c.tp = 3;
  c.fp = 1;
  CHECK(precision_of(c, Label::Seg) == 0.75);
  c = Confusion{};
  c.tp = 3;
  c.fn = 1;
  CHECK(recall_of(c, Label::Seg) == 0.75);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const double x = uniform01(rng);
    CHECK(f1_from(x, x) == doctest::Approx(x).epsilon(1e-12));  // harmonic identity
  }
  CHECK(f1_from(0.0, 0.0) == 0.0);
}

TEST_CASE("metric formulas: published CNN-A row") {
  const double f1 = f1_from(0.853, 0.718);
  CHECK(round3(f1) == 0.780);
  CHECK(std::abs(f1 - 0.778) <= 0.003);  // reported value came from unrounded internals

  CHECK(round3(f1_from(0.909, 1.0)) == 0.952);  // CNN-A_u NO_SEG row
}

TEST_CASE("metric oracle: brute-force recount over random prediction lists") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<Label> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng() % 4 == 0 ? Label::Seg : Label::NoSeg;
      pred[i] = rng() % 3 == 0 ? Label::Seg : Label::NoSeg;
    }
    Confusion c;
    for (std::size_t i = 0; i < n; ++i) c.add(truth[i], pred[i]);

    // independent recount
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (truth[i] == pred[i]) ++correct;
      if (pred[i] == Label::Seg)
        truth[i] == Label::Seg ? ++tp : ++fp;
      else
        truth[i] == Label::NoSeg ? ++tn : ++fn;
    }
    REQUIRE(c.tp == tp);
    REQUIRE(c.fp == fp);
    REQUIRE(c.tn == tn);
    REQUIRE(c.fn == fn);

    const MetricsReport r = metrics_from_confusion(c, 1.0);
    CHECK(r.accuracy == static_cast<double>(correct) / static_cast<double>(n));
    CHECK(r.precision_seg ==
          (tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0));
    CHECK(r.recall_seg ==
          (tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0));
    CHECK(r.precision_no_seg ==
          (tn + fn ? static_cast<double>(tn) / static_cast<double>(tn + fn) : 0.0));
    CHECK(r.recall_no_seg ==
          (tn + fp ? static_cast<double>(tn) / static_cast<double>(tn + fp) : 0.0));
    CHECK(r.f1_seg == f1_from(r.precision_seg, r.recall_seg));
    CHECK(r.samples == n);
  }
}

TEST_CASE("majority baseline: CNN-A_u row and degenerate datasets") {
  std::vector<Label> truth(1000, Label::NoSeg);
  for (std::size_t i = 0; i < 91; ++i) truth[i * 10] = Label::Seg;  // 909/1000 prior
  const MetricsReport r = majority_baseline(truth);
  CHECK(r.accuracy == 0.909);
  CHECK(r.precision_no_seg == 0.909);
  CHECK(r.recall_no_seg == 1.0);
  CHECK(round3(r.f1_no_seg) == 0.952);
  CHECK(r.precision_seg == 0.0);
  CHECK(r.recall_seg == 0.0);
  CHECK(r.f1_seg == 0.0);

  const std::vector<Label> all_seg(10, Label::Seg);
  CHECK(majority_baseline(all_seg).accuracy == 0.0);
  const std::vector<Label> all_noseg(10, Label::NoSeg);
  CHECK(majority_baseline(all_noseg).accuracy == 1.0);

  // baseline identity: accuracy is exactly 1 - SEG prior
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 500;
    std::vector<Label> t(n);
    std::size_t seg = 0;
    for (auto& l : t) {
      l = rng() % 5 == 0 ? Label::Seg : Label::NoSeg;
      seg += l == Label::Seg;
    }
    CHECK(majority_baseline(t).accuracy ==
          static_cast<double>(n - seg) / static_cast<double>(n));
  }
}

TEST_CASE("metrics report serialization: fixed key order") {
  Confusion c;
  c.tp = 1;
  c.fp = 2;
  c.tn = 3;
  c.fn = 4;
  const MetricsReport r = metrics_from_confusion(c, 0.5);
  std::ostringstream out;
  write_metrics(r, out);
  const std::string text = out.str();
  CHECK(text.rfind("samples=10\nalpha=0.500000\ntp=1\nfp=2\ntn=3\nfn=4\naccuracy=0.400000\n",
                   0) == 0);
  CHECK(text.find("precision_seg=") < text.find("recall_seg="));
  CHECK(text.find("f1_seg=") < text.find("precision_no_seg="));
  CHECK(text.back() == '\n');
}

TEST_CASE("evaluate: perfect predictor and degenerate conventions") {
  // sign-separable data through a hand-crafted exact model
  LabeledSequence seq;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const bool seg = rng() % 3 == 0;
    seq.words.push_back(seg ? "oui" : "non");
    seq.labels.push_back(seg ? Label::Seg : Label::NoSeg);
  }
  WindowConfig cfg;
  cfg.m = 1;
  cfg.n = 1;
  const auto samples = build_windows(seq, cfg);
  EmbeddingTable table;
  table.dim = 1;
  table.vocab = {{"oui", 0}, {"non", 1}};
  table.word_matrix = {1.0f, -1.0f};

  Model<float> perfect = sign_model();
  const MetricsReport r = evaluate(perfect, seq, cfg, samples, table, 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.f1_seg == 1.0);
  CHECK(r.f1_no_seg == 1.0);
  CHECK(r.confusion.fp == 0);
  CHECK(r.confusion.fn == 0);

  // all-NO_SEG truth with an always-SEG predictor: zero-denominator rules
  LabeledSequence flat;
  for (int i = 0; i < 20; ++i) {
    flat.words.push_back("non");
    flat.labels.push_back(Label::NoSeg);
  }
  const auto flat_samples = build_windows(flat, cfg);
  Model<float> always_seg(ModelId::CnnC, 1, 1,
                          {LayerConfig::flatten(), LayerConfig::dense(2)});
  always_seg.parameters()[0]->fill(0.0f);
  always_seg.parameters()[1]->data = {-10.0f, 10.0f};
  const MetricsReport z = evaluate(always_seg, flat, cfg, flat_samples, table, 1.0);
  CHECK(z.accuracy == 0.0);
  CHECK(z.precision_seg == 0.0);
  CHECK(z.recall_seg == 0.0);  // no true SEG samples
  CHECK(z.f1_seg == 0.0);
  CHECK(z.precision_no_seg == 0.0);  // never predicted
  CHECK(z.recall_no_seg == 0.0);
}

TEST_CASE("train: zero epochs leaves the model untouched") {
  Fixture f = sentinel_fixture(20, 5);
  Model<float> model = mini_model(f.cfg.m, f.cfg.n);
  model.init_params(9);
  const auto before = snapshot(model);

  TrainConfig tcfg;
  tcfg.epochs = 0;
  tcfg.batch_size = 8;
  const TrainResult r = train(model, f.seq, f.cfg, f.samples, f.table, tcfg);
  CHECK(r.curve.empty());
  CHECK(r.val_curve.empty());
  const auto after = snapshot(model);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].data == after[i].data);
}

TEST_CASE("train: toy separable dataset converges below 0.1") {
  Fixture f = sentinel_fixture(120, 11);
  Model<float> model = mini_model(f.cfg.m, f.cfg.n);
  model.init_params(2);

  TrainConfig tcfg;
  tcfg.epochs = 40;
  tcfg.batch_size = 32;
  tcfg.seed = 7;
  tcfg.lr = 3e-3;
  tcfg.log_interval = 10;
  tcfg.val_fraction = 0.0;
  const TrainResult r = train(model, f.seq, f.cfg, f.samples, f.table, tcfg);
  REQUIRE_FALSE(r.curve.empty());
  CHECK(r.curve.front().loss > r.curve.back().loss);
  CHECK(r.curve.back().loss < 0.1);

  // strictly increasing steps, finite losses
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    CHECK(std::isfinite(r.curve[i].loss));
    if (i) CHECK(r.curve[i].step > r.curve[i - 1].step);
  }

  const double train_loss = evaluate_loss(model, f.seq, f.cfg, f.samples, f.table);
  CHECK(train_loss < 0.1);
  const MetricsReport m = evaluate(model, f.seq, f.cfg, f.samples, f.table, 1.0);
  CHECK(m.accuracy >= 0.99);
}

TEST_CASE("train: deterministic under a fixed seed") {
  Fixture f = sentinel_fixture(30, 21);
  TrainConfig tcfg;
  tcfg.epochs = 3;
  tcfg.batch_size = 16;
  tcfg.seed = 77;
  tcfg.keep_p = 0.8;

  auto run = [&] {
    Model<float> model = mini_model(f.cfg.m, f.cfg.n, 0.8f);
    model.init_params(tcfg.seed);
    const TrainResult r = train(model, f.seq, f.cfg, f.samples, f.table, tcfg);
    return std::make_pair(r, snapshot(model));
  };
  const auto [r1, p1] = run();
  const auto [r2, p2] = run();
  REQUIRE(r1.curve.size() == r2.curve.size());
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    CHECK(r1.curve[i].step == r2.curve[i].step);
    CHECK(r1.curve[i].loss == r2.curve[i].loss);  // bit-identical
  }
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i].data == p2[i].data);
}

TEST_CASE("train: stop_loss ends training early once an epoch converges") {
  Fixture f = sentinel_fixture(120, 11);
  Model<float> model = mini_model(f.cfg.m, f.cfg.n);
  model.init_params(2);
  TrainConfig tcfg;
  tcfg.epochs = 200;
  tcfg.batch_size = 32;
  tcfg.seed = 7;
  tcfg.lr = 3e-3;
  tcfg.val_fraction = 0.0;
  tcfg.stop_loss = 0.1;
  const TrainResult r = train(model, f.seq, f.cfg, f.samples, f.table, tcfg);
  CHECK(r.epochs_completed < 200);
  CHECK(r.epochs_completed >= 1);
  CHECK(evaluate_loss(model, f.seq, f.cfg, f.samples, f.table) < 0.2);
}

TEST_CASE("train: validation carve produces one point per epoch") {
  Fixture f = sentinel_fixture(40, 31);
  Model<float> model = mini_model(f.cfg.m, f.cfg.n);
  model.init_params(4);
  TrainConfig tcfg;
  tcfg.epochs = 4;
  tcfg.batch_size = 16;
  tcfg.val_fraction = 0.2;
  const TrainResult r = train(model, f.seq, f.cfg, f.samples, f.table, tcfg);
  CHECK(r.val_curve.size() == 4);
  for (std::size_t i = 1; i < r.val_curve.size(); ++i)
    CHECK(r.val_curve[i].step > r.val_curve[i - 1].step);
}

TEST_CASE("train: aborts on a non-finite loss with step context") {
  // finite logits whose true-class probability underflows to exactly zero
  LabeledSequence seq;
  seq.words = {"a"};
  seq.labels = {Label::Seg};
  WindowConfig cfg;
  cfg.m = 1;
  cfg.n = 2;
  const auto samples = build_windows(seq, cfg);
  EmbeddingTable table;
  table.dim = 2;
  table.vocab = {{"a", 0}};
  table.word_matrix = {0.0f, 0.0f};

  Model<float> model(ModelId::CnnC, 1, 2, {LayerConfig::flatten(), LayerConfig::dense(2)});
  model.parameters()[0]->fill(0.0f);
  model.parameters()[1]->data = {0.0f, -200.0f};

  TrainConfig tcfg;
  tcfg.epochs = 1;
  tcfg.batch_size = 1;
  CHECK_THROWS_WITH_AS(train(model, seq, cfg, samples, table, tcfg),
                       doctest::Contains("non-finite training loss at step 1"), NumericError);
}

TEST_CASE("loss sanity: first logged loss of an untrained model near ln 2") {
  LabeledSequence seq;
  std::vector<std::string> vocab;
  for (int i = 0; i < 64; ++i) {
    const std::string w = "w" + std::to_string(i);
    vocab.push_back(w);
    seq.words.push_back(w);
    seq.labels.push_back(i % 2 ? Label::Seg : Label::NoSeg);  // balanced
  }
  WindowConfig cfg;
  cfg.m = 5;
  cfg.n = 6;
  const auto samples = build_windows(seq, cfg);
  const EmbeddingTable table = test::random_table(6, vocab, 19);

  Model<float> model = mini_model(cfg.m, cfg.n);
  model.init_params(23);
  TrainConfig tcfg;
  tcfg.epochs = 1;
  tcfg.batch_size = 32;
  tcfg.log_interval = 1000;  // only step 1 and the final step get logged
  tcfg.val_fraction = 0.0;
  const TrainResult r = train(model, seq, cfg, samples, table, tcfg);
  REQUIRE_FALSE(r.curve.empty());
  CHECK(r.curve.front().step == 1);
  CHECK(r.curve.front().loss > 0.5);
  CHECK(r.curve.front().loss < 0.9);
}

TEST_CASE("alpha sweep: SEG recall non-decreasing as alpha drops") {
  Fixture f = sentinel_fixture(60, 41);
  Model<float> model = mini_model(f.cfg.m, f.cfg.n);
  model.init_params(6);
  TrainConfig tcfg;
  tcfg.epochs = 2;  // deliberately undertrained so predictions stay mixed
  tcfg.batch_size = 16;
  tcfg.val_fraction = 0.0;
  train(model, f.seq, f.cfg, f.samples, f.table, tcfg);

  double prev_seg_recall = -1.0, prev_noseg_recall = 2.0;
  for (const double alpha : {1.0, 0.75, 0.5, 0.25, 0.1}) {
    const MetricsReport r = evaluate(model, f.seq, f.cfg, f.samples, f.table, alpha);
    CHECK(r.recall_seg >= prev_seg_recall);
    CHECK(r.recall_no_seg <= prev_noseg_recall);
    prev_seg_recall = r.recall_seg;
    prev_noseg_recall = r.recall_no_seg;
  }
}

TEST_CASE("write_loss_curve format") {
  const LossCurve curve = {{1, 0.6931471}, {50, 0.25}, {100, 0.0625}};
  std::ostringstream out;
  write_loss_curve(curve, out);
  CHECK(out.str() == "1\t0.693147\n50\t0.250000\n100\t0.062500\n");
}

TEST_CASE("train/evaluate dimension validation") {
  Fixture f = sentinel_fixture(10, 51);
  Model<float> wrong = mini_model(5, 4);  // n mismatch with table dim 6
  wrong.init_params(1);
  TrainConfig tcfg;
  CHECK_THROWS_AS(train(wrong, f.seq, f.cfg, f.samples, f.table, tcfg), ConfigError);
  CHECK_THROWS_AS(evaluate(wrong, f.seq, f.cfg, f.samples, f.table, 1.0), ConfigError);

  Model<float> ok = mini_model(5, 6);
  ok.init_params(1);
  CHECK_THROWS_AS(evaluate(ok, f.seq, f.cfg, {}, f.table, 1.0), ConfigError);
}
