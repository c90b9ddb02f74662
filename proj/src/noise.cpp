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

#include "segrobust/noise.hpp"

#include <algorithm>
#include <cmath>

#include "segrobust/rng.hpp"

namespace segrobust {
namespace {

double lattice(std::uint64_t key, int octave, long gx, long gy) {
  CounterRng rng(derive_key({key, static_cast<std::uint64_t>(octave), static_cast<std::uint64_t>(gx),
                             static_cast<std::uint64_t>(gy)}));
  return rng.uniform();
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

void normalize(Field& f) {
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  const double a = *lo, span = *hi - *lo;
  for (double& v : f.values) v = span > 0.0 ? (v - a) / span : 0.0;
}

}  // namespace

Field fractal_noise(std::size_t height, std::size_t width, std::uint64_t key, double cell, int octaves,
                    double persistence) {
  Field f{height, width, std::vector<double>(height * width, 0.0)};
  double amplitude = 1.0, total = 0.0, spacing = std::max(cell, 1.0);
  for (int o = 0; o < octaves; ++o) {
    for (std::size_t y = 0; y < height; ++y) {
      const double fy = static_cast<double>(y) / spacing;
      const auto gy = static_cast<long>(std::floor(fy));
      const double ty = smooth(fy - static_cast<double>(gy));
      for (std::size_t x = 0; x < width; ++x) {
        const double fx = static_cast<double>(x) / spacing;
        const auto gx = static_cast<long>(std::floor(fx));
        const double tx = smooth(fx - static_cast<double>(gx));
        const double top = lattice(key, o, gx, gy) * (1.0 - tx) + lattice(key, o, gx + 1, gy) * tx;
        const double bottom = lattice(key, o, gx, gy + 1) * (1.0 - tx) + lattice(key, o, gx + 1, gy + 1) * tx;
        f.at(y, x) += amplitude * (top * (1.0 - ty) + bottom * ty);
      }
    }
    total += amplitude;
    amplitude *= persistence;
    spacing = std::max(spacing / 2.0, 1.0);
  }
  for (double& v : f.values) v /= total;
  return f;
}

Field plasma_fractal(std::size_t height, std::size_t width, std::uint64_t key, double decay) {
  std::size_t size = 1;
  while (size < std::max(height, width)) size <<= 1;
  const std::size_t n = size + 1;
  std::vector<double> grid(n * n, 0.0);
  auto g = [&](std::size_t y, std::size_t x) -> double& { return grid[(y % size) * n + (x % size)]; };
  CounterRng rng(key);

  double wibble = 100.0;
  for (std::size_t step = size; step >= 2; step /= 2) {
    const std::size_t half = step / 2;
    // Squares: centre of each cell from its four corners.
    for (std::size_t y = 0; y < size; y += step) {
      for (std::size_t x = 0; x < size; x += step) {
        const double avg = (g(y, x) + g(y, x + step) + g(y + step, x) + g(y + step, x + step)) / 4.0;
        g(y + half, x + half) = avg + wibble * rng.uniform(-1.0, 1.0);
      }
    }
    // Diamonds: edge midpoints from their (wrapped) neighbours.
    for (std::size_t y = 0; y < size; y += half) {
      for (std::size_t x = (y / half) % 2 == 0 ? half : 0; x < size; x += step) {
        const double avg =
            (g(y + size - half, x) + g(y + half, x) + g(y, x + size - half) + g(y, x + half)) / 4.0;
        g(y, x) = avg + wibble * rng.uniform(-1.0, 1.0);
      }
    }
    wibble /= decay;
  }
  Field f{height, width, std::vector<double>(height * width)};
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) f.at(y, x) = g(y, x);
  }
  normalize(f);
  return f;
}

}  // namespace segrobust
