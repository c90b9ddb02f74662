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
#include <vector>

namespace segrobust {

// Row-major H x W scalar field.
struct Field {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

// Multi-octave value noise in [0, 1]. The coarsest lattice has spacing
// `cell` pixels; each further octave halves the spacing and scales the
// amplitude by `persistence`.
Field fractal_noise(std::size_t height, std::size_t width, std::uint64_t key, double cell, int octaves,
                    double persistence);

// Diamond-square plasma on a power-of-two grid covering H x W, normalized to
// [0, 1]. Larger `decay` damps fine detail faster (smoother result).
Field plasma_fractal(std::size_t height, std::size_t width, std::uint64_t key, double decay);

}  // namespace segrobust
