#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbd/ops.hpp"
#include "sbd/tensor.hpp"

namespace sbd {

using ops::RunMode;

enum class LayerKind : std::uint8_t {
  Conv2d = 0,
  MaxPool2d = 1,
  Dense = 2,
  Relu = 3,
  Dropout = 4,
  Flatten = 5,
};

const char* layer_kind_name(LayerKind kind);

// One layer's configuration. in_channels / in_units are derived during
// stack shape-checking; builders may leave them zero.
struct LayerConfig {
  LayerKind kind = LayerKind::Relu;
  std::uint32_t out_filters = 0, in_channels = 0, kh = 0, kw = 0;  // conv
  std::uint32_t pool_kh = 0, pool_kw = 0, sh = 0, sw = 0;          // pool
  std::uint32_t out_units = 0, in_units = 0;                       // dense
  float keep_p = 1.0f;                                             // dropout

  static LayerConfig conv(std::uint32_t filters, std::uint32_t kh, std::uint32_t kw);
  static LayerConfig pool(std::uint32_t kh, std::uint32_t kw, std::uint32_t sh,
                          std::uint32_t sw);
  static LayerConfig dense(std::uint32_t units);
  static LayerConfig relu();
  static LayerConfig dropout(float keep_p);
  static LayerConfig flatten();

  // Five u32 config fields of the checkpoint record (see models.hpp).
  std::array<std::uint32_t, 5> pack() const;
  static LayerConfig unpack(LayerKind kind, const std::array<std::uint32_t, 5>& f);

  std::string describe() const;
  bool operator==(const LayerConfig&) const = default;
};

// Per-sample shape during stack inference: spatial maps or a flat vector.
struct StageShape {
  bool flat = false;
  std::size_t c = 1, h = 0, w = 0;  // spatial
  std::size_t k = 0;                // flat

  std::size_t flat_size() const { return flat ? k : c * h * w; }
  std::string str() const;
  bool operator==(const StageShape&) const = default;
};

// Computes a layer's output shape, throwing ShapeError when the layer cannot
// accept `in`; fills the config's derived fields (in_channels / in_units).
StageShape infer_output_shape(LayerConfig& cfg, const StageShape& in);

struct ForwardCtx {
  RunMode mode = RunMode::Eval;
  std::uint64_t dropout_seed = 0;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual const LayerConfig& config() const = 0;
  virtual TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) = 0;
  virtual TensorT<T> backward(const TensorT<T>& dy) = 0;  // accumulates param grads
  virtual std::vector<TensorT<T>*> params() { return {}; }
  virtual std::vector<TensorT<T>*> grads() { return {}; }

 protected:
  void require_cache(bool have, const char* what) const {
    if (!have) throw StateError(std::string(what) + ": backward before forward");
  }
};

template <typename T>
class Conv2dLayer final : public Layer<T> {
 public:
  explicit Conv2dLayer(const LayerConfig& cfg)
      : cfg_(cfg),
        weights_({cfg.out_filters, cfg.in_channels, cfg.kh, cfg.kw}),
        bias_({cfg.out_filters}),
        dweights_(weights_.shape),
        dbias_(bias_.shape) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx&) override {
    input_ = x;
    has_cache_ = true;
    return ops::conv2d_forward(x, weights_, bias_);
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "conv2d");
    auto g = ops::conv2d_backward(input_, weights_, dy);
    for (std::size_t i = 0; i < dweights_.numel(); ++i) dweights_.data[i] += g.dweights.data[i];
    for (std::size_t i = 0; i < dbias_.numel(); ++i) dbias_.data[i] += g.dbias.data[i];
    return std::move(g.dinput);
  }

  std::vector<TensorT<T>*> params() override { return {&weights_, &bias_}; }
  std::vector<TensorT<T>*> grads() override { return {&dweights_, &dbias_}; }

 private:
  LayerConfig cfg_;
  TensorT<T> weights_, bias_, dweights_, dbias_;
  TensorT<T> input_;
  bool has_cache_ = false;
};

template <typename T>
class MaxPool2dLayer final : public Layer<T> {
 public:
  explicit MaxPool2dLayer(const LayerConfig& cfg) : cfg_(cfg) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx&) override {
    in_shape_ = x.shape;
    auto r = ops::maxpool2d_forward(x, cfg_.pool_kh, cfg_.pool_kw, cfg_.sh, cfg_.sw);
    argmax_ = std::move(r.argmax);
    has_cache_ = true;
    return std::move(r.output);
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "maxpool2d");
    return ops::maxpool2d_backward<T>(in_shape_, argmax_, dy);
  }

 private:
  LayerConfig cfg_;
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
  bool has_cache_ = false;
};

template <typename T>
class DenseLayer final : public Layer<T> {
 public:
  explicit DenseLayer(const LayerConfig& cfg)
      : cfg_(cfg),
        weights_({cfg.out_units, cfg.in_units}),
        bias_({cfg.out_units}),
        dweights_(weights_.shape),
        dbias_(bias_.shape) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx&) override {
    input_ = x;
    has_cache_ = true;
    return ops::dense_forward(x, weights_, bias_);
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "dense");
    auto g = ops::dense_backward(input_, weights_, dy);
    for (std::size_t i = 0; i < dweights_.numel(); ++i) dweights_.data[i] += g.dweights.data[i];
    for (std::size_t i = 0; i < dbias_.numel(); ++i) dbias_.data[i] += g.dbias.data[i];
    return std::move(g.dinput);
  }

  std::vector<TensorT<T>*> params() override { return {&weights_, &bias_}; }
  std::vector<TensorT<T>*> grads() override { return {&dweights_, &dbias_}; }

 private:
  LayerConfig cfg_;
  TensorT<T> weights_, bias_, dweights_, dbias_;
  TensorT<T> input_;
  bool has_cache_ = false;
};

template <typename T>
class ReluLayer final : public Layer<T> {
 public:
  explicit ReluLayer(const LayerConfig& cfg) : cfg_(cfg) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx&) override {
    input_ = x;
    has_cache_ = true;
    return ops::relu(x);
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "relu");
    return ops::relu_backward(input_, dy);
  }

 private:
  LayerConfig cfg_;
  TensorT<T> input_;
  bool has_cache_ = false;
};

template <typename T>
class DropoutLayer final : public Layer<T> {
 public:
  DropoutLayer(const LayerConfig& cfg, std::size_t ordinal) : cfg_(cfg), ordinal_(ordinal) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
    const std::uint64_t seed = splitmix64(ctx.dropout_seed ^ (ordinal_ + 1));
    fwd_ = ops::dropout(x, cfg_.keep_p, ctx.mode, seed);
    has_cache_ = true;
    return fwd_.output;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "dropout");
    return ops::dropout_backward(fwd_, dy);
  }

 private:
  LayerConfig cfg_;
  std::size_t ordinal_;
  ops::DropoutResult<T> fwd_;
  bool has_cache_ = false;
};

template <typename T>
class FlattenLayer final : public Layer<T> {
 public:
  explicit FlattenLayer(const LayerConfig& cfg) : cfg_(cfg) {}

  const LayerConfig& config() const override { return cfg_; }

  TensorT<T> forward(const TensorT<T>& x, const ForwardCtx&) override {
    ops::check_rank(x, 4, "flatten input");
    in_shape_ = x.shape;
    has_cache_ = true;
    TensorT<T> out;
    out.shape = {x.shape[0], x.shape[1] * x.shape[2] * x.shape[3]};
    out.data = x.data;
    return out;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    this->require_cache(has_cache_, "flatten");
    TensorT<T> din;
    din.shape = in_shape_;
    din.data = dy.data;
    return din;
  }

 private:
  LayerConfig cfg_;
  std::vector<std::size_t> in_shape_;
  bool has_cache_ = false;
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerConfig& cfg, std::size_t ordinal) {
  switch (cfg.kind) {
    case LayerKind::Conv2d:
      return std::make_unique<Conv2dLayer<T>>(cfg);
    case LayerKind::MaxPool2d:
      return std::make_unique<MaxPool2dLayer<T>>(cfg);
    case LayerKind::Dense:
      return std::make_unique<DenseLayer<T>>(cfg);
    case LayerKind::Relu:
      return std::make_unique<ReluLayer<T>>(cfg);
    case LayerKind::Dropout:
      return std::make_unique<DropoutLayer<T>>(cfg, ordinal);
    case LayerKind::Flatten:
      return std::make_unique<FlattenLayer<T>>(cfg);
  }
  throw ConfigError("unknown layer kind " + std::to_string(static_cast<int>(cfg.kind)));
}

}  // namespace sbd
