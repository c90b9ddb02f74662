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

#include "segrobust/labels.hpp"

#include <string>

#include "segrobust/error.hpp"

namespace segrobust {

LabelMap::LabelMap(std::size_t height, std::size_t width, std::vector<int> classes)
    : height_(height), width_(width), classes_(std::move(classes)) {
  if (classes_.size() != height_ * width_) throw UsageError("label map data does not match its extents");
}

void LabelMap::validate(int num_classes) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] < 0 || classes_[i] >= num_classes) {
      throw DataError("label " + std::to_string(classes_[i]) + " at pixel " + std::to_string(i) +
                      " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

LabelMap nearest_resize(const LabelMap& labels, std::size_t out_height, std::size_t out_width) {
  if (out_height == 0 || out_width == 0) throw UsageError("nearest_resize: empty target size");
  if (labels.height() == out_height && labels.width() == out_width) return labels;
  // Same corner-aligned coordinate map as bilinear_resize, rounded.
  auto source = [](std::size_t i, std::size_t in, std::size_t out) -> std::size_t {
    if (out == 1 || in == 1) return 0;
    const double s = static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
    return static_cast<std::size_t>(s + 0.5);
  };
  LabelMap out(out_height, out_width);
  for (std::size_t y = 0; y < out_height; ++y) {
    const std::size_t sy = source(y, labels.height(), out_height);
    for (std::size_t x = 0; x < out_width; ++x) {
      out.at(y, x) = labels.at(sy, source(x, labels.width(), out_width));
    }
  }
  return out;
}

}  // namespace segrobust
