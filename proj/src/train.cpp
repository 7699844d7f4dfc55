#include "sbd/train.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sbd/ops.hpp"

namespace sbd {

namespace {

std::vector<int> label_ints(std::span<const Label> labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = label_index(labels[i]);
  return out;
}

void check_dims(const Model<float>& model, const WindowConfig& cfg,
                const EmbeddingTable& table) {
  if (cfg.m != model.m() || cfg.n != model.n())
    throw ConfigError("window config " + std::to_string(cfg.m) + "x" + std::to_string(cfg.n) +
                      " does not match model input " + std::to_string(model.m()) + "x" +
                      std::to_string(model.n()));
  if (table.dim != model.n())
    throw ConfigError("embedding dimension " + std::to_string(table.dim) +
                      " does not match model input width " + std::to_string(model.n()));
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(keep_p > 0.0) || keep_p > 1.0) throw ConfigError("keep probability must be in (0,1]");
  if (log_interval == 0) throw ConfigError("log interval must be >= 1");
  if (!(val_fraction >= 0.0) || val_fraction >= 1.0)
    throw ConfigError("validation fraction must be in [0,1)");
  if (!(stop_loss >= 0.0)) throw ConfigError("stop loss must be >= 0");
}

TrainResult train(Model<float>& model, const LabeledSequence& seq, const WindowConfig& cfg,
                  std::span<const WindowSample> samples, const EmbeddingTable& table,
                  const TrainConfig& tcfg) {
  tcfg.validate();
  check_dims(model, cfg, table);
  if (samples.empty()) throw ConfigError("train: no samples");

  // Validation tail, for loss monitoring only.
  std::size_t val_count = static_cast<std::size_t>(
      std::floor(static_cast<double>(samples.size()) * tcfg.val_fraction));
  if (val_count >= samples.size()) val_count = 0;
  const auto train_samples = samples.first(samples.size() - val_count);
  const auto val_samples = samples.last(val_count);

  Adam<float> optimizer(model.parameters(), AdamConfig{tcfg.lr, 0.9, 0.999, 1e-8});

  const std::size_t steps_per_epoch =
      (train_samples.size() + tcfg.batch_size - 1) / tcfg.batch_size;
  const std::size_t total_steps = steps_per_epoch * tcfg.epochs;

  TrainResult result;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    BatchStream stream(seq, cfg, train_samples, tcfg.batch_size,
                       splitmix64(tcfg.seed ^ (0x5e11ed + epoch)), table);
    double epoch_loss_sum = 0.0;
    std::size_t epoch_batches = 0;
    while (auto batch = stream.next()) {
      ++step;
      const std::vector<int> labels = label_ints(batch->labels);
      const Tensor logits =
          model.forward(batch->input, ForwardCtx{RunMode::Train,
                                                 splitmix64(tcfg.seed ^ (0xd20b0 + step))});
      const auto xent = ops::softmax_xent(logits, labels);
      if (!std::isfinite(xent.loss)) {
        std::string centers;
        for (std::size_t i = 0; i < batch->sample_indices.size() && i < 8; ++i)
          centers += (i ? "," : "") + std::to_string(batch->sample_indices[i]);
        throw NumericError("non-finite training loss at step " + std::to_string(step) +
                           " (batch samples " + centers + ")");
      }
      if (step == 1 || step % tcfg.log_interval == 0 || step == total_steps)
        result.curve.push_back({step, xent.loss});
      epoch_loss_sum += xent.loss;
      ++epoch_batches;

      model.zero_grad();
      model.backward(ops::softmax_xent_backward(xent.probs, labels));
      optimizer.step(model.gradients());
    }
    ++result.epochs_completed;
    if (!val_samples.empty())
      result.val_curve.push_back(
          {step, evaluate_loss(model, seq, cfg, val_samples, table, tcfg.batch_size)});
    if (tcfg.stop_loss > 0.0 && epoch_batches > 0 &&
        epoch_loss_sum / static_cast<double>(epoch_batches) < tcfg.stop_loss)
      break;
  }
  return result;
}

double evaluate_loss(Model<float>& model, const LabeledSequence& seq, const WindowConfig& cfg,
                     std::span<const WindowSample> samples, const EmbeddingTable& table,
                     std::size_t batch_size) {
  check_dims(model, cfg, table);
  if (samples.empty()) throw ConfigError("evaluate_loss: no samples");
  double sum = 0.0;
  std::size_t count = 0;
  Tensor input;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t take = std::min(batch_size, samples.size() - start);
    input = Tensor({take, 1, cfg.m, cfg.n});
    std::vector<int> labels(take);
    for (std::size_t b = 0; b < take; ++b) {
      const WindowSample& s = samples[start + b];
      fill_window_matrix(seq, cfg, table, s.center_index,
                         input.data.data() + b * cfg.m * cfg.n);
      labels[b] = label_index(s.label);
    }
    const Tensor logits = model.forward(input, ForwardCtx{RunMode::Eval, 0});
    sum += ops::softmax_xent(logits, labels).loss * static_cast<double>(take);
    count += take;
  }
  return sum / static_cast<double>(count);
}

MetricsReport evaluate(Model<float>& model, const LabeledSequence& seq,
                       const WindowConfig& cfg, std::span<const WindowSample> samples,
                       const EmbeddingTable& table, double alpha, std::size_t batch_size) {
  check_dims(model, cfg, table);
  if (samples.empty()) throw ConfigError("evaluate: no samples");
  Confusion confusion;
  Tensor input;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t take = std::min(batch_size, samples.size() - start);
    input = Tensor({take, 1, cfg.m, cfg.n});
    for (std::size_t b = 0; b < take; ++b)
      fill_window_matrix(seq, cfg, table, samples[start + b].center_index,
                         input.data.data() + b * cfg.m * cfg.n);
    const auto predictions = predict_batch(model, input, alpha);
    for (std::size_t b = 0; b < take; ++b)
      confusion.add(samples[start + b].label, predictions[b].label);
  }
  return metrics_from_confusion(confusion, alpha);
}

void write_loss_curve(const LossCurve& curve, std::ostream& out) {
  char buf[64];
  for (const LossPoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\n", p.step, p.loss);
    out << buf;
  }
}

}  // namespace sbd
