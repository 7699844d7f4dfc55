#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sbd/label.hpp"
#include "sbd/layers.hpp"
#include "sbd/rng.hpp"
#include "sbd/tensor.hpp"

namespace sbd {

enum class ModelId : std::uint8_t { CnnA = 0, CnnB = 1, CnnC = 2 };

const char* model_id_name(ModelId id);
ModelId model_id_from_name(const std::string& name);  // cnn-a / cnn-b / cnn-c

// A validated sequential stack. Construction shape-checks the layer configs
// against a 1 x 1 x m x n input and resolves derived dimensions; a stack that
// constructs accepts every input of its declared size.
template <typename T>
class Model {
 public:
  Model(ModelId id, std::size_t m, std::size_t n, std::vector<LayerConfig> configs)
      : id_(id), m_(m), n_(n) {
    if (m == 0 || n == 0)
      throw ShapeError("model input dims must be positive, got m=" + std::to_string(m) +
                       " n=" + std::to_string(n));
    StageShape shape{false, 1, m, n, 0};
    for (std::size_t i = 0; i < configs.size(); ++i) {
      try {
        shape = infer_output_shape(configs[i], shape);
      } catch (const SbdError& e) {
        throw ShapeError("layer " + std::to_string(i) + " (" + configs[i].describe() +
                         "): " + e.what());
      }
      stage_shapes_.push_back(shape);
    }
    if (!(shape.flat && shape.k == 2))
      throw ShapeError("stack must end in 2 logits, ends in " + shape.str());
    configs_ = std::move(configs);
    for (std::size_t i = 0; i < configs_.size(); ++i)
      layers_.push_back(make_layer<T>(configs_[i], i));
  }

  ModelId id() const { return id_; }
  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  const std::vector<LayerConfig>& configs() const { return configs_; }
  const std::vector<StageShape>& stage_shapes() const { return stage_shapes_; }
  std::vector<std::unique_ptr<Layer<T>>>& layers() { return layers_; }

  // Fan-in scaled uniform init for conv/dense weights, zero biases. The draw
  // order (layers in order, weights row-major) is part of reproducibility.
  void init_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& layer : layers_) {
      const LayerConfig& cfg = layer->config();
      auto params = layer->params();
      if (params.empty()) continue;
      std::size_t fan_in = 0;
      if (cfg.kind == LayerKind::Conv2d)
        fan_in = static_cast<std::size_t>(cfg.in_channels) * cfg.kh * cfg.kw;
      else if (cfg.kind == LayerKind::Dense)
        fan_in = cfg.in_units;
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
      TensorT<T>& w = *params[0];
      for (auto& value : w.data) value = static_cast<T>(uniform_range(rng, -limit, limit));
      params[1]->fill(T{});
    }
  }

  TensorT<T> forward(const TensorT<T>& input, const ForwardCtx& ctx) {
    if (input.rank() != 4 || input.shape[1] != 1 || input.shape[2] != m_ ||
        input.shape[3] != n_)
      throw ShapeError("model expects B x 1 x " + std::to_string(m_) + " x " +
                       std::to_string(n_) + " input, got " + shape_str(input.shape));
    TensorT<T> x = input;
    for (auto& layer : layers_) x = layer->forward(x, ctx);
    return x;
  }

  TensorT<T> backward(const TensorT<T>& dlogits) {
    TensorT<T> g = dlogits;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  std::vector<TensorT<T>*> parameters() {
    std::vector<TensorT<T>*> out;
    for (auto& layer : layers_)
      for (auto* p : layer->params()) out.push_back(p);
    return out;
  }

  std::vector<TensorT<T>*> gradients() {
    std::vector<TensorT<T>*> out;
    for (auto& layer : layers_)
      for (auto* g : layer->grads()) out.push_back(g);
    return out;
  }

  void zero_grad() {
    for (auto* g : gradients()) g->fill(T{});
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto* p : parameters()) n += p->numel();
    return n;
  }

 private:
  ModelId id_;
  std::size_t m_, n_;
  std::vector<LayerConfig> configs_;
  std::vector<StageShape> stage_shapes_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// Hidden architectures as configured stacks (the dropout rate is a training
// choice; it defaults to keeping half).
std::vector<LayerConfig> cnn_a_configs(float keep_p = 0.5f);
std::vector<LayerConfig> cnn_b_configs(float keep_p = 0.5f);
std::vector<LayerConfig> cnn_c_configs(float keep_p = 0.5f);
std::vector<LayerConfig> model_configs(ModelId id, float keep_p = 0.5f);

template <typename T = float>
Model<T> build_model(ModelId id, std::size_t m, std::size_t n, float keep_p = 0.5f) {
  return Model<T>(id, m, n, model_configs(id, keep_p));
}

struct Prediction {
  Label label;
  std::array<double, 2> probs;  // unscaled softmax outputs: [NO_SEG, SEG]
};

// SEG wins when p_seg >= alpha * p_noseg; alpha = 1 is plain argmax with
// ties resolved toward SEG, alpha = 0.5 is the rescaling trick.
Label decide(const std::array<double, 2>& probs, double alpha);

std::array<double, 2> softmax2(double logit_noseg, double logit_seg);

Prediction predict(Model<float>& model, const Tensor& window, double alpha);
std::vector<Prediction> predict_batch(Model<float>& model, const Tensor& batch, double alpha);

// --------------------------------------------------------------------------
// Checkpoints. Binary layout, all integers little-endian:
//   magic "SBDC" | version u32 (=1) | model id u8 | m u32 | n u32 |
//   layer count u32 | per layer: kind u8 + five u32 config fields |
//   parameters as float32, in layer order, weights before biases.
// Config fields by kind: conv2d = filters, in_channels, kh, kw, 0;
// maxpool2d = kh, kw, sh, sw, 0; dense = units, in_units, 0, 0, 0;
// dropout = keep_p as float32 bits, 0...; relu/flatten = zeros.

struct CheckpointError : FormatError {
  enum class Kind {
    BadMagic,
    BadVersion,
    BadHeader,
    ShapeMismatch,
    Truncated,
    TrailingData,
  };
  Kind kind;
  CheckpointError(Kind k, const std::string& msg) : FormatError(msg), kind(k) {}
};

void save_checkpoint(Model<float>& model, std::ostream& out);
void save_checkpoint(Model<float>& model, const std::string& path);
Model<float> load_checkpoint(std::istream& in);
Model<float> load_checkpoint(const std::string& path);

}  // namespace sbd
