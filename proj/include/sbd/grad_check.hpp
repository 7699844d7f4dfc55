#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "sbd/models.hpp"
#include "sbd/ops.hpp"

namespace sbd {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t components_checked = 0;
};

inline double grad_rel_err(double analytic, double fd) {
  const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
  return std::abs(analytic - fd) / denom;
}

// Training loss of the model on one batch. The dropout seed is part of the
// closure, so repeated evaluations see identical masks and the loss is a
// differentiable function of parameters and input.
template <typename T>
double model_loss(Model<T>& model, const TensorT<T>& input, std::span<const int> labels,
                  RunMode mode, std::uint64_t dropout_seed) {
  const TensorT<T> logits = model.forward(input, ForwardCtx{mode, dropout_seed});
  return ops::softmax_xent(logits, labels).loss;
}

// Central-difference check of every selected parameter component (and the
// input) against reverse-mode gradients, in double precision.
// max_per_tensor == 0 checks every component; otherwise a deterministic
// sample of that size per tensor.
inline GradCheckReport check_gradients(Model<double>& model, const TensorT<double>& input,
                                       std::span<const int> labels, double h,
                                       std::size_t max_per_tensor,
                                       std::uint64_t sample_seed, bool include_input = true,
                                       RunMode mode = RunMode::Train,
                                       std::uint64_t dropout_seed = 17) {
  // Analytic pass.
  model.zero_grad();
  const TensorT<double> logits = model.forward(input, ForwardCtx{mode, dropout_seed});
  const auto xent = ops::softmax_xent(logits, labels);
  const TensorT<double> dinput = model.backward(ops::softmax_xent_backward(xent.probs, labels));

  std::vector<TensorT<double>*> tensors = model.parameters();
  std::vector<TensorT<double>> analytic;
  for (auto* g : model.gradients()) analytic.push_back(*g);

  TensorT<double> input_copy = input;
  if (include_input) {
    tensors.push_back(&input_copy);
    analytic.push_back(dinput);
  }

  std::mt19937_64 pick(sample_seed);
  GradCheckReport report;
  for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
    TensorT<double>& tensor = *tensors[ti];
    const bool is_input = include_input && ti + 1 == tensors.size();
    const TensorT<double>& in_ref = is_input ? input_copy : input;

    std::vector<std::size_t> components;
    if (max_per_tensor == 0 || tensor.numel() <= max_per_tensor) {
      components.resize(tensor.numel());
      for (std::size_t i = 0; i < components.size(); ++i) components[i] = i;
    } else {
      components.reserve(max_per_tensor);
      for (std::size_t i = 0; i < max_per_tensor; ++i)
        components.push_back(static_cast<std::size_t>(pick() % tensor.numel()));
    }

    for (const std::size_t i : components) {
      const double saved = tensor.data[i];
      tensor.data[i] = saved + h;
      const double up = model_loss(model, in_ref, labels, mode, dropout_seed);
      tensor.data[i] = saved - h;
      const double down = model_loss(model, in_ref, labels, mode, dropout_seed);
      tensor.data[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      report.max_rel_err = std::max(report.max_rel_err, grad_rel_err(analytic[ti].data[i], fd));
      ++report.components_checked;
    }
  }
  return report;
}

}  // namespace sbd
