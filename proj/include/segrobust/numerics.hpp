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
#include <functional>
#include <span>
#include <vector>

#include "segrobust/tensor.hpp"

namespace segrobust {

// log(sum(exp(v))) with max-shift. Throws UsageError on empty input.
double logsumexp(std::span<const double> v);

std::vector<double> softmax(std::span<const double> v);

double sigmoid(double x);

// log(1 + exp(x)) without overflow or cancellation.
double softplus(double x);

// log(sigmoid(x)) == -softplus(-x).
double log_sigmoid(double x);

Tensor relu(const Tensor& x);
// Passes grad where the forward input was positive.
Tensor relu_backward(const Tensor& grad_out, const Tensor& input);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

double sum(const Tensor& x);
double mean(const Tensor& x);
// Reduces one axis away; the result keeps the remaining axes in order.
Tensor sum_axis(const Tensor& x, std::size_t axis);
Tensor mean_axis(const Tensor& x, std::size_t axis);

// Corner-aligned bilinear resampling of an H x W x C tensor. Same-size
// resampling returns the input unchanged.
Tensor bilinear_resize(const Tensor& image, std::size_t out_height, std::size_t out_width);

// Mirrors an H x W x C tensor along the width axis.
Tensor flip_horizontal(const Tensor& image);

using ScalarFunction = std::function<double(const Tensor&)>;

// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) for every
// coordinate of x.
Tensor finite_difference(const ScalarFunction& f, const Tensor& x, double eps = 1e-5);

// ||a - b|| / max(||a||, ||b||, floor). The floor keeps the ratio meaningful
// when both gradients vanish.
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-8);

}  // namespace segrobust
