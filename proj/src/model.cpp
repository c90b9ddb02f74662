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

#include "segrobust/model.hpp"

#include <cmath>
#include <string>

#include "segrobust/conv.hpp"
#include "segrobust/error.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/parallel.hpp"
#include "segrobust/rng.hpp"

namespace segrobust {

std::size_t SegNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.kernel.size() + l.bias.size();
  return n;
}

SegNet make_segnet(HeadKind head, int num_classes, std::uint64_t seed) {
  SegNet net;
  net.head = head;
  net.num_classes = num_classes;
  std::vector<std::size_t> plan{3};
  plan.insert(plan.end(), std::begin(kHiddenChannels), std::end(kHiddenChannels));
  plan.push_back(static_cast<std::size_t>(logit_channels(head, num_classes)));

  for (std::size_t i = 0; i + 1 < plan.size(); ++i) {
    const bool last = i + 2 == plan.size();
    const std::size_t cin = plan[i], cout = plan[i + 1];
    ConvLayer layer{Tensor({3, 3, cin, cout}), std::vector<double>(cout, 0.0), !last};
    const double fan_in = 9.0 * static_cast<double>(cin);
    const double stddev = std::sqrt((last ? 1.0 : 2.0) / fan_in);
    // The hidden layers are identical across heads for a given seed; only
    // the classifier's width differs.
    CounterRng rng(derive_key({seed, 0x5E6E7ULL, i}));
    for (double& w : layer.kernel.data()) w = rng.normal(0.0, stddev);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

void check_input(const SegNet& net, const Tensor& image) {
  if (net.layers.empty()) throw UsageError("network has no layers");
  if (image.rank() != 3 || image.dim(2) != net.layers.front().kernel.dim(2)) {
    throw UsageError("input must be H x W x " + std::to_string(net.layers.front().kernel.dim(2)));
  }
}

// Activations entering each layer plus that layer's pre-activation output.
struct Trace {
  std::vector<Tensor> inputs;
  std::vector<Tensor> pre;
};

Tensor run_layers(const SegNet& net, const Tensor& image, Trace* trace) {
  check_input(net, image);
  Tensor h = image;
  for (const auto& layer : net.layers) {
    Tensor z = conv2d(h, layer.kernel, layer.bias);
    if (trace) trace->inputs.push_back(std::move(h));
    h = layer.relu ? relu(z) : z;
    if (trace) trace->pre.push_back(std::move(z));
  }
  return h;
}

}  // namespace

LogitMap forward(const SegNet& net, const Tensor& image) {
  return LogitMap{run_layers(net, image, nullptr), net.head, net.num_classes};
}

std::vector<LogitMap> forward(const SegNet& net, std::span<const Tensor> images, int workers) {
  std::vector<LogitMap> out(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) { out[i] = forward(net, images[i]); });
  return out;
}

ParameterGrads zero_grads(const SegNet& net) {
  ParameterGrads g;
  for (const auto& l : net.layers) g.push_back({Tensor(l.kernel.shape()), std::vector<double>(l.bias.size(), 0.0), false});
  return g;
}

BackwardResult backward(const SegNet& net, std::span<const Tensor> images, std::span<const LabelMap> labels,
                        int workers) {
  if (images.size() != labels.size()) throw UsageError("backward: image and label counts differ");
  if (images.empty()) throw UsageError("backward: empty batch");

  struct PerImage {
    double loss = 0.0;
    ParameterGrads grads;
  };
  std::vector<PerImage> parts(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) {
    Trace trace;
    LogitMap logits{run_layers(net, images[i], &trace), net.head, net.num_classes};
    BatchLoss bl = batch_loss(logits, labels[i]);
    PerImage& part = parts[i];
    part.loss = bl.loss;
    part.grads.resize(net.layers.size());
    Tensor g = std::move(bl.grad);
    for (std::size_t l = net.layers.size(); l-- > 0;) {
      const ConvLayer& layer = net.layers[l];
      if (layer.relu) g = relu_backward(g, trace.pre[l]);
      Conv2dGrads cg = conv2d_backward(g, trace.inputs[l], layer.kernel);
      part.grads[l] = {std::move(cg.kernel), std::move(cg.bias), false};
      g = std::move(cg.input);
    }
  });

  const double inv = 1.0 / static_cast<double>(images.size());
  BackwardResult result{0.0, zero_grads(net)};
  for (const PerImage& part : parts) {
    result.loss += part.loss;
    for (std::size_t l = 0; l < part.grads.size(); ++l) {
      auto dst = result.grads[l].kernel.data();
      const auto src = part.grads[l].kernel.data();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      for (std::size_t j = 0; j < part.grads[l].bias.size(); ++j) result.grads[l].bias[j] += part.grads[l].bias[j];
    }
  }
  result.loss *= inv;
  for (auto& g : result.grads) {
    for (double& v : g.kernel.data()) v *= inv;
    for (double& v : g.bias) v *= inv;
  }
  return result;
}

std::vector<double> flatten(const std::vector<ConvLayer>& layers) {
  std::vector<double> out;
  for (const auto& l : layers) {
    out.insert(out.end(), l.kernel.data().begin(), l.kernel.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void unflatten(std::span<const double> values, std::vector<ConvLayer>& layers) {
  std::size_t pos = 0;
  for (auto& l : layers) {
    if (pos + l.kernel.size() + l.bias.size() > values.size()) throw UsageError("unflatten: too few values");
    for (double& v : l.kernel.data()) v = values[pos++];
    for (double& v : l.bias) v = values[pos++];
  }
  if (pos != values.size()) throw UsageError("unflatten: too many values");
}

}  // namespace segrobust
