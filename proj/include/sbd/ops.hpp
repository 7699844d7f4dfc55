#pragma once

// Forward and backward kernels for the layer types the classifiers need.
// All convolutions are valid-padding, stride one; pooling carries the
// strides. Loop orders are fixed so results are reproducible bit-for-bit.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sbd/rng.hpp"
#include "sbd/tensor.hpp"

namespace sbd::ops {

enum class RunMode : std::uint8_t { Train, Eval };

template <typename T>
void check_rank(const TensorT<T>& t, std::size_t rank, const char* what) {
  if (t.rank() != rank)
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) +
                     " tensor, got " + shape_str(t.shape));
}

// ---------------------------------------------------------------------------
// conv2d

// input B x C x H x W, weights F x C x kh x kw, bias F
// -> B x F x (H-kh+1) x (W-kw+1)
template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& input, const TensorT<T>& weights,
                          const TensorT<T>& bias) {
  check_rank(input, 4, "conv2d input");
  check_rank(weights, 4, "conv2d weights");
  const std::size_t B = input.shape[0], C = input.shape[1];
  const std::size_t H = input.shape[2], W = input.shape[3];
  const std::size_t F = weights.shape[0], kh = weights.shape[2], kw = weights.shape[3];
  if (weights.shape[1] != C)
    throw ShapeError("conv2d: input channels " + std::to_string(C) +
                     " != kernel channels " + std::to_string(weights.shape[1]));
  if (bias.numel() != F) throw ShapeError("conv2d: bias size != filter count");
  if (kh > H || kw > W)
    throw ShapeError("conv2d: kernel " + shape_str(weights.shape) +
                     " larger than input " + shape_str(input.shape));
  const std::size_t OH = H - kh + 1, OW = W - kw + 1;

  TensorT<T> out({B, F, OH, OW});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t f = 0; f < F; ++f) {
      T* out_plane = &out.at4(b, f, 0, 0);
      const T bv = bias.data[f];
      for (std::size_t i = 0; i < OH * OW; ++i) out_plane[i] = bv;
      // accumulation order per output cell: c, then i, then j
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < kh; ++i) {
          for (std::size_t j = 0; j < kw; ++j) {
            const T wv = weights.at4(f, c, i, j);
            for (std::size_t y = 0; y < OH; ++y) {
              const T* in_row = &input.at4(b, c, y + i, j);
              T* out_row = out_plane + y * OW;
              for (std::size_t x = 0; x < OW; ++x) out_row[x] += in_row[x] * wv;
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
struct Conv2dGrads {
  TensorT<T> dinput;
  TensorT<T> dweights;
  TensorT<T> dbias;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const TensorT<T>& input, const TensorT<T>& weights,
                               const TensorT<T>& dout) {
  const std::size_t B = input.shape[0], C = input.shape[1];
  const std::size_t F = weights.shape[0], kh = weights.shape[2], kw = weights.shape[3];
  const std::size_t OH = dout.shape[2], OW = dout.shape[3];

  Conv2dGrads<T> g;
  g.dinput = TensorT<T>(input.shape);
  g.dweights = TensorT<T>(weights.shape);
  g.dbias = TensorT<T>({F});

  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t f = 0; f < F; ++f) {
      const T* go = &dout.at4(b, f, 0, 0);
      T acc = T{};
      for (std::size_t i = 0; i < OH * OW; ++i) acc += go[i];
      g.dbias.data[f] += acc;
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < kh; ++i) {
          for (std::size_t j = 0; j < kw; ++j) {
            const T wv = weights.at4(f, c, i, j);
            T wacc = T{};
            for (std::size_t y = 0; y < OH; ++y) {
              const T* in_row = &input.at4(b, c, y + i, j);
              const T* go_row = go + y * OW;
              T* din_row = &g.dinput.at4(b, c, y + i, j);
              for (std::size_t x = 0; x < OW; ++x) {
                wacc += go_row[x] * in_row[x];
                din_row[x] += go_row[x] * wv;
              }
            }
            g.dweights.at4(f, c, i, j) += wacc;
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// max pooling, floor semantics (trailing elements outside any window dropped)

template <typename T>
struct MaxPoolResult {
  TensorT<T> output;
  std::vector<std::size_t> argmax;  // flat input index per output element
};

template <typename T>
MaxPoolResult<T> maxpool2d_forward(const TensorT<T>& input, std::size_t kh, std::size_t kw,
                                   std::size_t sh, std::size_t sw) {
  check_rank(input, 4, "maxpool2d input");
  if (kh == 0 || kw == 0 || sh == 0 || sw == 0)
    throw ConfigError("maxpool2d: kernel and stride must be positive");
  const std::size_t B = input.shape[0], C = input.shape[1];
  const std::size_t H = input.shape[2], W = input.shape[3];
  if (kh > H || kw > W)
    throw ShapeError("maxpool2d: kernel (" + std::to_string(kh) + "x" + std::to_string(kw) +
                     ") larger than input " + shape_str(input.shape));
  const std::size_t OH = (H - kh) / sh + 1, OW = (W - kw) / sw + 1;

  MaxPoolResult<T> r;
  r.output = TensorT<T>({B, C, OH, OW});
  r.argmax.resize(r.output.numel());
  std::size_t o = 0;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t y = 0; y < OH; ++y) {
        for (std::size_t x = 0; x < OW; ++x, ++o) {
          // ties keep the first maximum in row-major window order
          std::size_t best = ((b * C + c) * H + y * sh) * W + x * sw;
          T best_v = input.data[best];
          for (std::size_t i = 0; i < kh; ++i) {
            for (std::size_t j = 0; j < kw; ++j) {
              const std::size_t idx = ((b * C + c) * H + (y * sh + i)) * W + (x * sw + j);
              if (input.data[idx] > best_v) {
                best_v = input.data[idx];
                best = idx;
              }
            }
          }
          r.output.data[o] = best_v;
          r.argmax[o] = best;
        }
      }
    }
  }
  return r;
}

template <typename T>
TensorT<T> maxpool2d_backward(std::span<const std::size_t> input_shape,
                              std::span<const std::size_t> argmax, const TensorT<T>& dout) {
  TensorT<T> dinput(std::vector<std::size_t>(input_shape.begin(), input_shape.end()));
  if (argmax.size() != dout.numel())
    throw ShapeError("maxpool2d backward: argmax/dout size mismatch");
  for (std::size_t o = 0; o < argmax.size(); ++o) dinput.data[argmax[o]] += dout.data[o];
  return dinput;
}

// ---------------------------------------------------------------------------
// dense (no activation; activations are separate layers)

// input B x K, weights U x K, bias U -> B x U
template <typename T>
TensorT<T> dense_forward(const TensorT<T>& input, const TensorT<T>& weights,
                         const TensorT<T>& bias) {
  check_rank(input, 2, "dense input");
  check_rank(weights, 2, "dense weights");
  const std::size_t B = input.shape[0], K = input.shape[1];
  const std::size_t U = weights.shape[0];
  if (weights.shape[1] != K)
    throw ShapeError("dense: input width " + std::to_string(K) + " != weight width " +
                     std::to_string(weights.shape[1]));
  if (bias.numel() != U) throw ShapeError("dense: bias size != unit count");

  TensorT<T> out({B, U});
  // Blocked over output units: every output keeps the sequential-k
  // accumulation of the naive dot product (bit-identical results); the
  // independent chains across the block give the compiler room to pipeline.
  constexpr std::size_t UB = 8;
  for (std::size_t b = 0; b < B; ++b) {
    const T* x = &input.at2(b, 0);
    std::size_t u = 0;
    for (; u + UB <= U; u += UB) {
      T acc[UB];
      const T* w[UB];
      for (std::size_t j = 0; j < UB; ++j) {
        acc[j] = bias.data[u + j];
        w[j] = &weights.at2(u + j, 0);
      }
      for (std::size_t k = 0; k < K; ++k) {
        const T xv = x[k];
        for (std::size_t j = 0; j < UB; ++j) acc[j] += xv * w[j][k];
      }
      for (std::size_t j = 0; j < UB; ++j) out.at2(b, u + j) = acc[j];
    }
    for (; u < U; ++u) {
      const T* w = &weights.at2(u, 0);
      T acc = bias.data[u];
      for (std::size_t k = 0; k < K; ++k) acc += x[k] * w[k];
      out.at2(b, u) = acc;
    }
  }
  return out;
}

template <typename T>
struct DenseGrads {
  TensorT<T> dinput;
  TensorT<T> dweights;
  TensorT<T> dbias;
};

template <typename T>
DenseGrads<T> dense_backward(const TensorT<T>& input, const TensorT<T>& weights,
                             const TensorT<T>& dout) {
  const std::size_t B = input.shape[0], K = input.shape[1];
  const std::size_t U = weights.shape[0];

  DenseGrads<T> g;
  g.dinput = TensorT<T>({B, K});
  g.dweights = TensorT<T>({U, K});
  g.dbias = TensorT<T>({U});

  for (std::size_t u = 0; u < U; ++u) {
    T* dw = &g.dweights.at2(u, 0);
    T acc = T{};
    for (std::size_t b = 0; b < B; ++b) {
      const T gv = dout.at2(b, u);
      acc += gv;
      const T* x = &input.at2(b, 0);
      for (std::size_t k = 0; k < K; ++k) dw[k] += gv * x[k];
    }
    g.dbias.data[u] = acc;
  }
  for (std::size_t b = 0; b < B; ++b) {
    T* dx = &g.dinput.at2(b, 0);
    for (std::size_t u = 0; u < U; ++u) {
      const T gv = dout.at2(b, u);
      const T* w = &weights.at2(u, 0);
      for (std::size_t k = 0; k < K; ++k) dx[k] += gv * w[k];
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// relu

template <typename T>
TensorT<T> relu(const TensorT<T>& input) {
  TensorT<T> out;
  out.shape = input.shape;
  out.data.resize(input.numel());
  for (std::size_t i = 0; i < input.numel(); ++i)
    out.data[i] = input.data[i] > T{} ? input.data[i] : T{};
  return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& input, const TensorT<T>& dout) {
  TensorT<T> din;
  din.shape = input.shape;
  din.data.resize(input.numel());
  for (std::size_t i = 0; i < input.numel(); ++i)
    din.data[i] = input.data[i] > T{} ? dout.data[i] : T{};
  return din;
}

// ---------------------------------------------------------------------------
// inverted dropout: kept activations scale by 1/keep_p at train time, so
// evaluation is the identity

template <typename T>
struct DropoutResult {
  TensorT<T> output;
  std::vector<T> mask;  // empty in eval mode; else 0 or 1/keep_p per element
};

template <typename T>
DropoutResult<T> dropout(const TensorT<T>& input, double keep_p, RunMode mode,
                         std::uint64_t seed) {
  if (!(keep_p > 0.0) || keep_p > 1.0)
    throw ConfigError("dropout keep probability must be in (0,1], got " +
                      std::to_string(keep_p));
  DropoutResult<T> r;
  if (mode == RunMode::Eval || keep_p == 1.0) {
    r.output = input;
    return r;
  }
  r.output.shape = input.shape;
  r.output.data.resize(input.numel());
  r.mask.resize(input.numel());
  std::mt19937_64 rng(seed);
  const T scale = static_cast<T>(1.0 / keep_p);
  for (std::size_t i = 0; i < input.numel(); ++i) {
    const T m = uniform01(rng) < keep_p ? scale : T{};
    r.mask[i] = m;
    r.output.data[i] = input.data[i] * m;
  }
  return r;
}

template <typename T>
TensorT<T> dropout_backward(const DropoutResult<T>& fwd, const TensorT<T>& dout) {
  if (fwd.mask.empty()) return dout;  // identity path
  TensorT<T> din;
  din.shape = dout.shape;
  din.data.resize(dout.numel());
  for (std::size_t i = 0; i < dout.numel(); ++i) din.data[i] = dout.data[i] * fwd.mask[i];
  return din;
}

// ---------------------------------------------------------------------------
// fused softmax + mean cross-entropy over two classes

template <typename T>
struct XentResult {
  double loss = 0.0;   // mean over the batch of -ln p[label]
  TensorT<T> probs;    // B x 2, rows sum to 1
};

template <typename T>
XentResult<T> softmax_xent(const TensorT<T>& logits, std::span<const int> labels) {
  check_rank(logits, 2, "softmax_xent logits");
  const std::size_t B = logits.shape[0];
  if (logits.shape[1] != 2)
    throw ShapeError("softmax_xent: expected 2 classes, got " +
                     std::to_string(logits.shape[1]));
  if (labels.size() != B) throw ShapeError("softmax_xent: labels size != batch");

  XentResult<T> r;
  r.probs = TensorT<T>({B, 2});
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const T l0 = logits.at2(b, 0), l1 = logits.at2(b, 1);
    if (!std::isfinite(static_cast<double>(l0)) || !std::isfinite(static_cast<double>(l1)))
      throw NumericError("softmax_xent: non-finite logit in row " + std::to_string(b));
    const T mx = l0 > l1 ? l0 : l1;
    const T e0 = std::exp(l0 - mx), e1 = std::exp(l1 - mx);
    const T z = e0 + e1;
    r.probs.at2(b, 0) = e0 / z;
    r.probs.at2(b, 1) = e1 / z;
    const int label = labels[b];
    if (label != 0 && label != 1)
      throw ConfigError("softmax_xent: label must be 0 or 1, got " + std::to_string(label));
    const T p = label == 0 ? r.probs.at2(b, 0) : r.probs.at2(b, 1);
    loss_sum += -std::log(static_cast<double>(p));
  }
  r.loss = loss_sum / static_cast<double>(B);
  return r;
}

// d(mean xent)/dlogits = (p - onehot) / B
template <typename T>
TensorT<T> softmax_xent_backward(const TensorT<T>& probs, std::span<const int> labels) {
  const std::size_t B = probs.shape[0];
  TensorT<T> d({B, 2});
  const T inv_b = static_cast<T>(1.0 / static_cast<double>(B));
  for (std::size_t b = 0; b < B; ++b) {
    d.at2(b, 0) = (probs.at2(b, 0) - (labels[b] == 0 ? T{1} : T{0})) * inv_b;
    d.at2(b, 1) = (probs.at2(b, 1) - (labels[b] == 1 ? T{1} : T{0})) * inv_b;
  }
  return d;
}

}  // namespace sbd::ops
