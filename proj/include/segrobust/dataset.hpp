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
#include <filesystem>
#include <string>
#include <vector>

#include "segrobust/labels.hpp"
#include "segrobust/tensor.hpp"

namespace segrobust {

enum class Split { Train, Val };

std::string_view split_name(Split split);

// Procedural scene generator standing in for a natural-image dataset.
// Each foreground class has a shape archetype (1 disk, 2 square, 3 triangle,
// 4 ring, 5 diamond, 6 cross, 7 ellipse) and a characteristic hue; the
// background is a multi-octave value-noise texture in random colors.
struct SyntheticSceneSpec {
  std::uint64_t seed = 1;
  int image_size = 64;
  int num_classes = 4;  // includes background
  int min_shapes = 1;
  int max_shapes = 3;
  double min_radius = 7.0;
  double max_radius = 16.0;
  double background_contrast = 0.35;  // amplitude of the background texture
  double foreground_contrast = 0.12;  // amplitude of the in-shape texture
  double color_jitter = 0.08;         // per-shape hue/value jitter
  double noise_floor = 0.02;          // i.i.d. Gaussian sensor noise
  double max_overlap = 0.25;          // rejected when this fraction of a shape is already covered
  int placement_retries = 20;
  int val_modulus = 5;                // ids hashing to 0 mod this go to validation

  void validate() const;

  friend bool operator==(const SyntheticSceneSpec&, const SyntheticSceneSpec&) = default;
};

inline constexpr int kMaxSyntheticClasses = 8;

struct Sample {
  Tensor image;    // H x W x 3 in [0, 1]
  LabelMap label;
  std::string id;
  Split split = Split::Train;
  int shapes_placed = 0;
};

std::string sample_id(std::size_t index);
Split split_for_id(const std::string& id, int val_modulus);

// Deterministic in spec.seed; sample i depends only on (seed, i).
// `forced_shapes` >= 0 overrides the per-image shape count.
Sample generate_sample(const SyntheticSceneSpec& spec, std::size_t index, int forced_shapes = -1);
std::vector<Sample> generate(const SyntheticSceneSpec& spec, std::size_t count, int workers = 1);

std::vector<Sample> select_split(const std::vector<Sample>& samples, Split split);

// On-disk layout:
//   <dir>/manifest.txt      header line then "<id> <train|val>" per sample
//   <dir>/images/<id>.ppm   binary P6
//   <dir>/labels/<id>.pgm   binary P5, one class index per byte
void write_dataset(const std::filesystem::path& dir, const std::vector<Sample>& samples, int num_classes);

struct LoadedDataset {
  int num_classes = 0;
  std::vector<Sample> samples;
};
LoadedDataset read_dataset(const std::filesystem::path& dir);

}  // namespace segrobust
