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
#include <string>
#include <string_view>
#include <vector>

#include "segrobust/labels.hpp"
#include "segrobust/tensor.hpp"

namespace segrobust {

enum class HeadKind { SoftmaxBaseline, IBE, SigmoidOnly, SCrIBE };

inline constexpr HeadKind kAllHeads[] = {HeadKind::SoftmaxBaseline, HeadKind::IBE, HeadKind::SigmoidOnly,
                                         HeadKind::SCrIBE};

// Short names used in configs, file names and reports: baseline, ibe,
// sigmoid, scribe.
std::string_view head_name(HeadKind head);
HeadKind parse_head(std::string_view name);

// True for heads whose background logit is implied by the foreground ones.
constexpr bool uses_implicit_background(HeadKind head) {
  return head == HeadKind::IBE || head == HeadKind::SCrIBE;
}

// Logit channels a head emits for k classes (k includes background).
int logit_channels(HeadKind head, int num_classes);

// Network output for one image. Channel layout:
//   SoftmaxBaseline / SigmoidOnly: k channels, channel c is class c.
//   IBE / SCrIBE: k-1 channels, channel j is foreground class j+1.
struct LogitMap {
  Tensor logits;
  HeadKind head = HeadKind::SoftmaxBaseline;
  int num_classes = 0;

  std::size_t height() const { return logits.dim(0); }
  std::size_t width() const { return logits.dim(1); }
  void validate() const;
};

// k-channel map whose last channel is the implicit background response
// -logsumexp(foreground). Channels 0..k-2 are the foreground logits as given.
struct AugmentedLogits {
  Tensor values;
};

AugmentedLogits ibe_augment(const LogitMap& fg);

// Appends -logsumexp(fg) to one foreground pixel vector.
std::vector<double> ibe_augment_pixel(std::span<const double> fg);

// Per-class response vector for a pixel: index c is class c. For implicit
// background heads the augmented vector is rotated so background comes first.
std::vector<double> class_ordered_response(HeadKind head, std::span<const double> logits);

struct PixelLoss {
  double loss = 0.0;
  std::vector<double> grad;
};

// -log softmax(v)[label]; grad = softmax(v) - onehot(label).
PixelLoss loss_softmax(std::span<const double> v, int label);

// Softmax cross entropy over ibe_augment(fg); gradient is the total
// derivative through the implicit background channel. For a background label
// loss = log(S^2 + 1) with S = sum(exp(fg)).
PixelLoss loss_ibe(std::span<const double> fg, int label);

// Positive-only sigmoid cross entropy: -log sigmoid(v[label]). Components
// other than the label receive exactly zero gradient.
PixelLoss loss_sigmoid(std::span<const double> v, int label);

// Sigmoid cross entropy with implicit background. Foreground label n:
// -log sigmoid(fg[n-1]), gradient only on that component. Background label:
// -log sigmoid(-logsumexp(fg)) = log(1 + S), gradient exp(fg_m) / (1 + S).
PixelLoss loss_scribe(std::span<const double> fg, int label);

PixelLoss pixel_loss(HeadKind head, std::span<const double> logits, int label);

// Probability of the background class under softmax of the augmented logits.
double ibe_background_probability(std::span<const double> fg);

// Argmax over class-ordered responses; ties go to the lowest class index.
int predict_pixel(HeadKind head, std::span<const double> logits);
LabelMap predict(const LogitMap& logits);

// Diagnostic SCrIBE decision rule: the foreground class with the largest
// sigmoid above 0.5, else background.
LabelMap predict_sigmoid_threshold(const LogitMap& logits);

// Per-pixel class probabilities under the head's own output rule, as an
// H x W x k tensor in class order. Softmax for baseline and IBE (augmented),
// independent sigmoids for the sigmoid heads.
Tensor class_probabilities(const LogitMap& logits);

struct BatchLoss {
  double loss = 0.0;
  Tensor grad;
};

// Mean per-pixel loss over the map; grad is each pixel's gradient / (H W).
BatchLoss batch_loss(const LogitMap& logits, const LabelMap& labels);

}  // namespace segrobust
