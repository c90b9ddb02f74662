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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "segrobust/corruptions.hpp"
#include "segrobust/error.hpp"

namespace segrobust {
namespace {

// Baseline quantization tables (ITU-T T.81 Annex K), row-major.
constexpr std::array<int, 64> kLumaTable{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,  14, 13, 16, 24, 40,  57,
    69, 56, 14, 17, 22,  29,  51,  87,  80, 62, 18, 22, 37,  56,  68,  109, 103, 77, 24, 35, 55,  64,
    81, 104, 113, 92, 49, 64, 78,  87,  103, 121, 120, 101, 72, 92, 95,  98,  112, 100, 103, 99};
constexpr std::array<int, 64> kChromaTable{
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// IJG quality scaling.
std::array<double, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> out{};
  for (std::size_t i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

struct DctBasis {
  std::array<double, 64> c{};  // c[u * 8 + x] = alpha(u) cos((2x + 1) u pi / 16)
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) c[static_cast<std::size_t>(u * 8 + x)] = alpha * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
  }
};

const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

// Orthonormal 2-D DCT-II of one 8x8 block, in place; inverse when `inverse`.
void dct8x8(std::array<double, 64>& block, bool inverse) {
  const auto& c = basis().c;
  std::array<double, 64> tmp{};
  for (int r = 0; r < 8; ++r) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) {
        s += inverse ? c[static_cast<std::size_t>(x * 8 + u)] * block[static_cast<std::size_t>(r * 8 + x)]
                     : c[static_cast<std::size_t>(u * 8 + x)] * block[static_cast<std::size_t>(r * 8 + x)];
      }
      tmp[static_cast<std::size_t>(r * 8 + u)] = s;
    }
  }
  for (int col = 0; col < 8; ++col) {
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) {
        s += inverse ? c[static_cast<std::size_t>(y * 8 + v)] * tmp[static_cast<std::size_t>(y * 8 + col)]
                     : c[static_cast<std::size_t>(v * 8 + y)] * tmp[static_cast<std::size_t>(y * 8 + col)];
      }
      block[static_cast<std::size_t>(v * 8 + col)] = s;
    }
  }
}

struct Plane {
  std::size_t height = 0, width = 0;
  std::vector<double> v;
  double& at(std::size_t y, std::size_t x) { return v[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return v[y * width + x]; }
};

// Quantizes every 8x8 block of a plane whose extents are multiples of 8.
void quantize_plane(Plane& p, const std::array<double, 64>& table) {
  std::array<double, 64> block{};
  for (std::size_t by = 0; by < p.height; by += 8) {
    for (std::size_t bx = 0; bx < p.width; bx += 8) {
      for (std::size_t i = 0; i < 64; ++i) block[i] = p.at(by + i / 8, bx + i % 8) - 128.0;
      dct8x8(block, false);
      for (std::size_t i = 0; i < 64; ++i) block[i] = std::round(block[i] / table[i]) * table[i];
      dct8x8(block, true);
      for (std::size_t i = 0; i < 64; ++i) p.at(by + i / 8, bx + i % 8) = block[i] + 128.0;
    }
  }
}

std::size_t round_up(std::size_t n, std::size_t m) { return (n + m - 1) / m * m; }

}  // namespace

Tensor jpeg_roundtrip(const Tensor& image, int quality) {
  if (quality < 1 || quality > 100) throw UsageError("JPEG quality must be in 1..100");
  if (image.rank() != 3 || image.dim(2) != 3) throw UsageError("JPEG round trip expects an H x W x 3 image");
  const std::size_t h = image.dim(0), w = image.dim(1);
  // MCU is 16x16 for 4:2:0; pad by edge replication.
  const std::size_t ph = round_up(h, 16), pw = round_up(w, 16);

  Plane y{ph, pw, std::vector<double>(ph * pw)};
  Plane cb{ph, pw, std::vector<double>(ph * pw)};
  Plane cr{ph, pw, std::vector<double>(ph * pw)};
  for (std::size_t i = 0; i < ph; ++i) {
    for (std::size_t j = 0; j < pw; ++j) {
      const std::size_t si = std::min(i, h - 1), sj = std::min(j, w - 1);
      const double r = std::round(std::clamp(image.at(si, sj, 0), 0.0, 1.0) * 255.0);
      const double g = std::round(std::clamp(image.at(si, sj, 1), 0.0, 1.0) * 255.0);
      const double b = std::round(std::clamp(image.at(si, sj, 2), 0.0, 1.0) * 255.0);
      y.at(i, j) = 0.299 * r + 0.587 * g + 0.114 * b;
      cb.at(i, j) = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
      cr.at(i, j) = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
    }
  }

  // 2x2 box-averaged chroma.
  auto subsample = [&](const Plane& full) {
    Plane half{ph / 2, pw / 2, std::vector<double>(ph * pw / 4)};
    for (std::size_t i = 0; i < half.height; ++i) {
      for (std::size_t j = 0; j < half.width; ++j) {
        half.at(i, j) = (full.at(2 * i, 2 * j) + full.at(2 * i + 1, 2 * j) + full.at(2 * i, 2 * j + 1) +
                         full.at(2 * i + 1, 2 * j + 1)) / 4.0;
      }
    }
    return half;
  };
  Plane cb_half = subsample(cb), cr_half = subsample(cr);

  quantize_plane(y, scaled_table(kLumaTable, quality));
  const auto chroma = scaled_table(kChromaTable, quality);
  quantize_plane(cb_half, chroma);
  quantize_plane(cr_half, chroma);

  // Decoder: bilinear ("fancy") chroma upsampling with centred samples.
  auto upsample = [&](const Plane& half, std::size_t i, std::size_t j) {
    const double sy = std::clamp((static_cast<double>(i) - 0.5) / 2.0, 0.0, static_cast<double>(half.height - 1));
    const double sx = std::clamp((static_cast<double>(j) - 0.5) / 2.0, 0.0, static_cast<double>(half.width - 1));
    const auto y0 = static_cast<std::size_t>(sy), x0 = static_cast<std::size_t>(sx);
    const std::size_t y1 = std::min(y0 + 1, half.height - 1), x1 = std::min(x0 + 1, half.width - 1);
    const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
    return (half.at(y0, x0) * (1 - fx) + half.at(y0, x1) * fx) * (1 - fy) +
           (half.at(y1, x0) * (1 - fx) + half.at(y1, x1) * fx) * fy;
  };

  Tensor out({h, w, 3});
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double yy = y.at(i, j);
      const double u = upsample(cb_half, i, j) - 128.0;
      const double v = upsample(cr_half, i, j) - 128.0;
      const double rgb[3] = {yy + 1.402 * v, yy - 0.344136 * u - 0.714136 * v, yy + 1.772 * u};
      for (std::size_t c = 0; c < 3; ++c) out.at(i, j, c) = std::round(std::clamp(rgb[c], 0.0, 255.0)) / 255.0;
    }
  }
  return out;
}

}  // namespace segrobust
