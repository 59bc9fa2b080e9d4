// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace arpvc {

/// Dense row-major array, rank 1..4. Shapes follow (channels, height, width)
/// for activations and (out_ch, in_ch, kh, kw) for convolution weights.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 4)
      throw std::invalid_argument("tensor: rank must be 1..4, got " + std::to_string(shape_.size()));
    std::size_t n = 1;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (shape_[i] < 1)
        throw std::invalid_argument("tensor: extent of axis " + std::to_string(i) +
                                    " must be >= 1, got " + std::to_string(shape_[i]));
      n *= static_cast<std::size_t>(shape_[i]);
    }
    data_.assign(n, T(0));
  }

  static Tensor zeros_like(const Tensor& o) { return Tensor(o.shape_); }

  int rank() const { return static_cast<int>(shape_.size()); }
  int extent(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // (c, y, x) accessors for rank-3 activations.
  T& at(int c, int y, int x) { return data_[idx3(c, y, x)]; }
  const T& at(int c, int y, int x) const { return data_[idx3(c, y, x)]; }
  std::size_t idx3(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x;
  }

  // (o, i, ky, kx) accessor for rank-4 weights.
  T& at4(int o, int i, int ky, int kx) { return data_[idx4(o, i, ky, kx)]; }
  const T& at4(int o, int i, int ky, int kx) const { return data_[idx4(o, i, ky, kx)]; }
  std::size_t idx4(int o, int i, int ky, int kx) const {
    return ((static_cast<std::size_t>(o) * shape_[1] + i) * shape_[2] + ky) * shape_[3] + kx;
  }

  T* plane(int c) { return data_.data() + static_cast<std::size_t>(c) * shape_[1] * shape_[2]; }
  const T* plane(int c) const { return data_.data() + static_cast<std::size_t>(c) * shape_[1] * shape_[2]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

template <typename T>
void fill_uniform(Tensor<T>& t, T lo, T hi, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(static_cast<double>(lo), static_cast<double>(hi));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(dist(rng));
}

template <typename T>
bool all_finite(const Tensor<T>& t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!std::isfinite(t[i])) return false;
  return true;
}

}  // namespace arpvc
