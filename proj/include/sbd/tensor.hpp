#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sbd/errors.hpp"

namespace sbd {

// Dense row-major tensor. Float storage in production; the double
// instantiation exists for finite-difference gradient checking.
template <typename T>
struct TensorT {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(count(shape), T{});
  }

  static std::size_t count(std::span<const std::size_t> s) {
    std::size_t n = 1;
    for (const std::size_t d : s) n *= d;
    return n;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t dim(std::size_t i) const { return i < shape.size() ? shape[i] : 1; }

  T& at2(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  const T& at2(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  T& at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) {
    return data[((b * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  const T& at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) const {
    return data[((b * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

using Tensor = TensorT<float>;

inline std::string shape_str(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  s += ")";
  return s;
}

template <typename T>
void require_shape(const TensorT<T>& t, std::span<const std::size_t> expect,
                   const char* what) {
  if (!std::equal(expect.begin(), expect.end(), t.shape.begin(), t.shape.end()))
    throw ShapeError(std::string(what) + ": expected shape " + shape_str(expect) +
                     ", got " + shape_str(t.shape));
}

}  // namespace sbd
