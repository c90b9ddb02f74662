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

#include <span>
#include <vector>

#include "segrobust/tensor.hpp"

namespace segrobust {

// Stride-1 cross-correlation with zero "same" padding.
//   input:  H x W x Cin
//   kernel: kh x kw x Cin x Cout, kh and kw odd
//   bias:   Cout
// Returns H x W x Cout.
Tensor conv2d(const Tensor& input, const Tensor& kernel, std::span<const double> bias);

struct Conv2dGrads {
  Tensor input;
  Tensor kernel;
  std::vector<double> bias;
};

// Adjoint of conv2d with respect to all three arguments.
Conv2dGrads conv2d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& kernel);

}  // namespace segrobust
