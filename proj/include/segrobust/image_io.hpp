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

#include <filesystem>
#include <string>

#include "segrobust/labels.hpp"
#include "segrobust/tensor.hpp"

namespace segrobust {

// Binary PPM (P6, maxval 255). Values are clamped to [0, 1] and rounded to
// the nearest 1/255 step on write.
void write_image(const std::filesystem::path& path, const Tensor& image);
Tensor read_image(const std::filesystem::path& path);

// Binary PGM (P5, maxval 255) holding raw class indices.
void write_label(const std::filesystem::path& path, const LabelMap& labels);
// Throws DataError when an index is >= num_classes.
LabelMap read_label(const std::filesystem::path& path, int num_classes);

// In-memory codecs behind the file functions; errors name the byte offset.
std::string encode_ppm(const Tensor& image);
Tensor decode_ppm(const std::string& bytes);
std::string encode_pgm(const LabelMap& labels);
LabelMap decode_pgm(const std::string& bytes);

}  // namespace segrobust
