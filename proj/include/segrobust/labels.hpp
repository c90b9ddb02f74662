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
#include <cstdint>
#include <vector>

namespace segrobust {

// Background is class 0 in every label map.
inline constexpr int kBackgroundClass = 0;

// H x W map of class indices.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(std::size_t height, std::size_t width, int fill = kBackgroundClass)
      : height_(height), width_(width), classes_(height * width, fill) {}
  LabelMap(std::size_t height, std::size_t width, std::vector<int> classes);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return classes_.size(); }

  int& at(std::size_t y, std::size_t x) { return classes_[y * width_ + x]; }
  int at(std::size_t y, std::size_t x) const { return classes_[y * width_ + x]; }
  int& operator[](std::size_t i) { return classes_[i]; }
  int operator[](std::size_t i) const { return classes_[i]; }
  const std::vector<int>& classes() const { return classes_; }

  // Throws DataError when any value falls outside [0, num_classes).
  void validate(int num_classes) const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<int> classes_;
};

LabelMap nearest_resize(const LabelMap& labels, std::size_t out_height, std::size_t out_width);

}  // namespace segrobust
