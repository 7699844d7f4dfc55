#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sbd/tensor.hpp"

namespace sbd {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-tensor accumulators for one bias-corrected adaptive-moment step.
template <typename T>
struct AdamState {
  std::vector<T> m;  // first moment
  std::vector<T> v;  // second moment
};

// One update on a single parameter tensor. `t` is the post-increment step
// count (1 on the first call).
template <typename T>
void adam_step(TensorT<T>& param, const TensorT<T>& grad, AdamState<T>& state,
               std::uint64_t t, const AdamConfig& cfg) {
  if (!param.same_shape(grad))
    throw ShapeError("adam: parameter shape " + shape_str(param.shape) +
                     " != gradient shape " + shape_str(grad.shape));
  if (state.m.size() != param.numel()) {
    state.m.assign(param.numel(), T{});
    state.v.assign(param.numel(), T{});
  }
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.numel(); ++i) {
    const double g = static_cast<double>(grad.data[i]);
    const double m = cfg.beta1 * static_cast<double>(state.m[i]) + (1.0 - cfg.beta1) * g;
    const double v = cfg.beta2 * static_cast<double>(state.v[i]) + (1.0 - cfg.beta2) * g * g;
    state.m[i] = static_cast<T>(m);
    state.v[i] = static_cast<T>(v);
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    param.data[i] = static_cast<T>(static_cast<double>(param.data[i]) -
                                   cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
  }
}

// Optimizer over a fixed parameter list (the model's parameters()).
template <typename T>
class Adam {
 public:
  Adam(std::vector<TensorT<T>*> params, AdamConfig cfg)
      : params_(std::move(params)), states_(params_.size()), cfg_(cfg) {}

  void step(const std::vector<TensorT<T>*>& grads) {
    if (grads.size() != params_.size())
      throw ShapeError("adam: gradient list size mismatch");
    ++t_;
    for (std::size_t i = 0; i < params_.size(); ++i)
      adam_step(*params_[i], *grads[i], states_[i], t_, cfg_);
  }

  std::uint64_t step_count() const { return t_; }

 private:
  std::vector<TensorT<T>*> params_;
  std::vector<AdamState<T>> states_;
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace sbd
