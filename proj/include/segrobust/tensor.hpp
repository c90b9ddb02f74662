// Copyright 2026 The segrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace segrobust {

// Dense row-major tensor of doubles. Images and logit maps are rank 3
// (height x width x channels); convolution kernels are rank 4
// (kh x kw x cin x cout).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Rank-3 accessors.
  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * shape_[1] + x) * shape_[2] + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * shape_[1] + x) * shape_[2] + c];
  }
  // Channel vector of pixel (y, x) in a rank-3 tensor.
  std::span<const double> pixel(std::size_t y, std::size_t x) const {
    return std::span<const double>(data_).subspan((y * shape_[1] + x) * shape_[2], shape_[2]);
  }
  std::span<double> pixel(std::size_t y, std::size_t x) {
    return std::span<double>(data_).subspan((y * shape_[1] + x) * shape_[2], shape_[2]);
  }

  // Same data, new shape with the same element count.
  Tensor reshaped(std::vector<std::size_t> shape) const;

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

// Builds a rank-3 image tensor, checking the shape.
Tensor make_image(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);

}  // namespace segrobust
