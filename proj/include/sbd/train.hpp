#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sbd/adam.hpp"
#include "sbd/metrics.hpp"
#include "sbd/models.hpp"
#include "sbd/window.hpp"

namespace sbd {

struct TrainConfig {
  std::size_t batch_size = 256;
  std::size_t epochs = 5;
  double lr = 1e-3;
  double keep_p = 0.5;  // informational here; baked into the model's dropout layer
  std::uint64_t seed = 42;
  std::size_t log_interval = 50;    // steps between loss-curve points
  double val_fraction = 0.05;       // tail of the training samples held out
                                    // for loss monitoring (0 disables)
  double stop_loss = 0.0;           // stop once an epoch's mean batch loss
                                    // falls below this (0 disables)

  void validate() const;
};

struct LossPoint {
  std::size_t step;  // 1-based global step
  double loss;
};
using LossCurve = std::vector<LossPoint>;

struct TrainResult {
  LossCurve curve;      // training batch loss at step 1, every interval, last step
  LossCurve val_curve;  // validation loss at each epoch end (eval mode)
  std::size_t epochs_completed = 0;
};

// epochs x shuffled minibatches of forward/backward/adam with dropout
// active. Deterministic under a fixed seed. Aborts with NumericError when
// the loss goes non-finite, naming the step and batch sample indices.
TrainResult train(Model<float>& model, const LabeledSequence& seq, const WindowConfig& cfg,
                  std::span<const WindowSample> samples, const EmbeddingTable& table,
                  const TrainConfig& tcfg);

// Mean cross-entropy over samples, eval mode.
double evaluate_loss(Model<float>& model, const LabeledSequence& seq, const WindowConfig& cfg,
                     std::span<const WindowSample> samples, const EmbeddingTable& table,
                     std::size_t batch_size = 256);

MetricsReport evaluate(Model<float>& model, const LabeledSequence& seq,
                       const WindowConfig& cfg, std::span<const WindowSample> samples,
                       const EmbeddingTable& table, double alpha,
                       std::size_t batch_size = 256);

// Two-column text: step<TAB>loss.
void write_loss_curve(const LossCurve& curve, std::ostream& out);

}  // namespace sbd
