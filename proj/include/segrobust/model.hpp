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

#include <cstdint>
#include <span>
#include <vector>

#include "segrobust/heads.hpp"
#include "segrobust/labels.hpp"
#include "segrobust/tensor.hpp"

namespace segrobust {

struct ConvLayer {
  Tensor kernel;              // kh x kw x cin x cout
  std::vector<double> bias;   // cout
  bool relu = false;

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

// Fully convolutional segmentation network: 3x3 same-padding convolutions
// 3 -> 16 -> 32 -> 32 -> C with ReLU between layers and a linear final layer.
// C is logit_channels(head, k). Spatial size is preserved end to end.
struct SegNet {
  HeadKind head = HeadKind::SoftmaxBaseline;
  int num_classes = 0;
  std::vector<ConvLayer> layers;

  std::size_t parameter_count() const;
  int output_channels() const { return static_cast<int>(layers.back().bias.size()); }

  friend bool operator==(const SegNet&, const SegNet&) = default;
};

inline constexpr std::size_t kHiddenChannels[] = {16, 32, 32};

// He-normal fan-in initialization for hidden layers, fan-in scaled normal
// for the linear classifier, zero biases. Deterministic in `seed`.
SegNet make_segnet(HeadKind head, int num_classes, std::uint64_t seed);

LogitMap forward(const SegNet& net, const Tensor& image);
std::vector<LogitMap> forward(const SegNet& net, std::span<const Tensor> images, int workers = 1);

// Same layout as SegNet::layers; `relu` is unused.
using ParameterGrads = std::vector<ConvLayer>;

struct BackwardResult {
  double loss = 0.0;  // mean of per-image batch_loss over the batch
  ParameterGrads grads;
};

// Exact gradient of the mean batch loss through every layer. Per-image work
// may run on `workers` threads; the reduction is in image order.
BackwardResult backward(const SegNet& net, std::span<const Tensor> images, std::span<const LabelMap> labels,
                        int workers = 1);

// Flattened parameter vector (kernel then bias, layer by layer) for
// gradient checks and optimizers.
std::vector<double> flatten(const std::vector<ConvLayer>& layers);
void unflatten(std::span<const double> values, std::vector<ConvLayer>& layers);
ParameterGrads zero_grads(const SegNet& net);

}  // namespace segrobust
