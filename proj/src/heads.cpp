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

#include "segrobust/heads.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segrobust/error.hpp"
#include "segrobust/numerics.hpp"

namespace segrobust {

std::string_view head_name(HeadKind head) {
  switch (head) {
    case HeadKind::SoftmaxBaseline: return "baseline";
    case HeadKind::IBE: return "ibe";
    case HeadKind::SigmoidOnly: return "sigmoid";
    case HeadKind::SCrIBE: return "scribe";
  }
  return "unknown";
}

HeadKind parse_head(std::string_view name) {
  for (HeadKind h : kAllHeads) {
    if (head_name(h) == name) return h;
  }
  throw UsageError("unknown head '" + std::string(name) + "' (expected baseline, ibe, sigmoid or scribe)");
}

int logit_channels(HeadKind head, int num_classes) {
  if (num_classes < 2) throw UsageError("a segmentation head needs at least 2 classes");
  if (uses_implicit_background(head)) {
    if (num_classes < 3) throw UsageError("implicit background heads need at least 2 foreground classes");
    return num_classes - 1;
  }
  return num_classes;
}

void LogitMap::validate() const {
  if (logits.rank() != 3) throw UsageError("logit map must be H x W x C");
  if (static_cast<int>(logits.dim(2)) != logit_channels(head, num_classes)) {
    throw UsageError("logit map has " + std::to_string(logits.dim(2)) + " channels; head " +
                     std::string(head_name(head)) + " with k=" + std::to_string(num_classes) + " expects " +
                     std::to_string(logit_channels(head, num_classes)));
  }
}

namespace {

void check_label(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw UsageError("label " + std::to_string(label) + " outside [0, " + std::to_string(num_classes) + ")");
  }
}

// Augmented-layout index of a class: background sits in the last channel.
std::size_t augmented_index(int label, std::size_t fg_channels) {
  return label == kBackgroundClass ? fg_channels : static_cast<std::size_t>(label - 1);
}

}  // namespace

std::vector<double> ibe_augment_pixel(std::span<const double> fg) {
  std::vector<double> out(fg.begin(), fg.end());
  out.push_back(-logsumexp(fg));
  return out;
}

AugmentedLogits ibe_augment(const LogitMap& fg) {
  fg.validate();
  if (!uses_implicit_background(fg.head)) {
    throw UsageError("ibe_augment requires an implicit-background head, got " + std::string(head_name(fg.head)));
  }
  const std::size_t h = fg.height(), w = fg.width(), c = fg.logits.dim(2);
  Tensor out({h, w, c + 1});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto src = fg.logits.pixel(y, x);
      auto dst = out.pixel(y, x);
      std::copy(src.begin(), src.end(), dst.begin());
      dst[c] = -logsumexp(src);
    }
  }
  return {std::move(out)};
}

std::vector<double> class_ordered_response(HeadKind head, std::span<const double> logits) {
  if (!uses_implicit_background(head)) return {logits.begin(), logits.end()};
  std::vector<double> out;
  out.reserve(logits.size() + 1);
  out.push_back(-logsumexp(logits));
  out.insert(out.end(), logits.begin(), logits.end());
  return out;
}

PixelLoss loss_softmax(std::span<const double> v, int label) {
  check_label(label, static_cast<int>(v.size()));
  PixelLoss out;
  out.loss = logsumexp(v) - v[static_cast<std::size_t>(label)];
  out.grad = softmax(v);
  out.grad[static_cast<std::size_t>(label)] -= 1.0;
  return out;
}

PixelLoss loss_ibe(std::span<const double> fg, int label) {
  const std::size_t c = fg.size();
  check_label(label, static_cast<int>(c) + 1);
  const std::vector<double> u = ibe_augment_pixel(fg);
  const std::size_t target = augmented_index(label, c);

  // d loss / d u, then chain through u_bg = -logsumexp(fg).
  std::vector<double> du = softmax(u);
  du[target] -= 1.0;
  const std::vector<double> fg_soft = softmax(fg);

  PixelLoss out;
  out.loss = logsumexp(u) - u[target];
  out.grad.resize(c);
  for (std::size_t n = 0; n < c; ++n) out.grad[n] = du[n] - du[c] * fg_soft[n];
  return out;
}

PixelLoss loss_sigmoid(std::span<const double> v, int label) {
  check_label(label, static_cast<int>(v.size()));
  const auto n = static_cast<std::size_t>(label);
  PixelLoss out;
  out.loss = softplus(-v[n]);
  out.grad.assign(v.size(), 0.0);
  out.grad[n] = -(1.0 - sigmoid(v[n]));
  return out;
}

PixelLoss loss_scribe(std::span<const double> fg, int label) {
  const std::size_t c = fg.size();
  check_label(label, static_cast<int>(c) + 1);
  PixelLoss out;
  out.grad.assign(c, 0.0);
  if (label != kBackgroundClass) {
    const auto n = static_cast<std::size_t>(label - 1);
    out.loss = softplus(-fg[n]);
    out.grad[n] = -(1.0 - sigmoid(fg[n]));
    return out;
  }
  // -log sigmoid(-lse) = softplus(lse) = log(1 + S)
  out.loss = softplus(logsumexp(fg));
  for (std::size_t m = 0; m < c; ++m) out.grad[m] = std::exp(fg[m] - out.loss);
  return out;
}

PixelLoss pixel_loss(HeadKind head, std::span<const double> logits, int label) {
  switch (head) {
    case HeadKind::SoftmaxBaseline: return loss_softmax(logits, label);
    case HeadKind::IBE: return loss_ibe(logits, label);
    case HeadKind::SigmoidOnly: return loss_sigmoid(logits, label);
    case HeadKind::SCrIBE: return loss_scribe(logits, label);
  }
  throw UsageError("unknown head");
}

double ibe_background_probability(std::span<const double> fg) {
  const std::vector<double> u = ibe_augment_pixel(fg);
  return std::exp(u.back() - logsumexp(u));
}

int predict_pixel(HeadKind head, std::span<const double> logits) {
  const std::vector<double> r = class_ordered_response(head, logits);
  // max_element returns the first maximum, i.e. the lowest class index.
  return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

LabelMap predict(const LogitMap& logits) {
  logits.validate();
  LabelMap out(logits.height(), logits.width());
  for (std::size_t y = 0; y < logits.height(); ++y) {
    for (std::size_t x = 0; x < logits.width(); ++x) out.at(y, x) = predict_pixel(logits.head, logits.logits.pixel(y, x));
  }
  return out;
}

LabelMap predict_sigmoid_threshold(const LogitMap& logits) {
  logits.validate();
  if (!uses_implicit_background(logits.head)) {
    throw UsageError("threshold rule applies to implicit-background heads only");
  }
  LabelMap out(logits.height(), logits.width());
  for (std::size_t y = 0; y < logits.height(); ++y) {
    for (std::size_t x = 0; x < logits.width(); ++x) {
      const auto v = logits.logits.pixel(y, x);
      const auto best = std::max_element(v.begin(), v.end());
      out.at(y, x) = sigmoid(*best) > 0.5 ? static_cast<int>(best - v.begin()) + 1 : kBackgroundClass;
    }
  }
  return out;
}

Tensor class_probabilities(const LogitMap& logits) {
  logits.validate();
  const auto k = static_cast<std::size_t>(logits.num_classes);
  Tensor out({logits.height(), logits.width(), k});
  for (std::size_t y = 0; y < logits.height(); ++y) {
    for (std::size_t x = 0; x < logits.width(); ++x) {
      const std::vector<double> r = class_ordered_response(logits.head, logits.logits.pixel(y, x));
      auto dst = out.pixel(y, x);
      switch (logits.head) {
        case HeadKind::SoftmaxBaseline:
        case HeadKind::IBE: {
          const std::vector<double> p = softmax(r);
          std::copy(p.begin(), p.end(), dst.begin());
          break;
        }
        case HeadKind::SigmoidOnly:
        case HeadKind::SCrIBE:
          for (std::size_t c = 0; c < k; ++c) dst[c] = sigmoid(r[c]);
          break;
      }
    }
  }
  return out;
}

BatchLoss batch_loss(const LogitMap& logits, const LabelMap& labels) {
  logits.validate();
  if (labels.height() != logits.height() || labels.width() != logits.width()) {
    throw UsageError("batch_loss: label map and logit map extents differ");
  }
  const std::size_t pixels = labels.size();
  if (pixels == 0) throw UsageError("batch_loss: empty map");
  const double inv = 1.0 / static_cast<double>(pixels);
  const std::size_t c = logits.logits.dim(2);

  BatchLoss out{0.0, Tensor(logits.logits.shape())};
  double total = 0.0;
  for (std::size_t p = 0; p < pixels; ++p) {
    const auto v = logits.logits.data().subspan(p * c, c);
    const PixelLoss pl = pixel_loss(logits.head, v, labels[p]);
    total += pl.loss;
    for (std::size_t n = 0; n < c; ++n) out.grad[p * c + n] = pl.grad[n] * inv;
  }
  out.loss = total * inv;
  return out;
}

}  // namespace segrobust
