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

#include "segrobust/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/image_io.hpp"
#include "segrobust/noise.hpp"
#include "segrobust/parallel.hpp"
#include "segrobust/rng.hpp"

namespace segrobust {
namespace {

using Rgb = std::array<double, 3>;

// Prototype colors for foreground classes 1..7.
constexpr std::array<Rgb, kMaxSyntheticClasses> kClassColors{{
    {0.5, 0.5, 0.5},  // background, unused
    {0.85, 0.20, 0.20},
    {0.20, 0.72, 0.25},
    {0.22, 0.30, 0.88},
    {0.88, 0.80, 0.18},
    {0.78, 0.25, 0.80},
    {0.20, 0.78, 0.80},
    {0.92, 0.52, 0.15},
}};

constexpr std::uint64_t kStageLayout = 1, kStageBackground = 2, kStageShapeTexture = 3, kStageSensor = 4;

struct Shape {
  int cls = 0;
  double cx = 0, cy = 0, radius = 0, angle = 0;
};

bool inside(const Shape& s, double px, double py) {
  const double dx = px - s.cx, dy = py - s.cy;
  const double c = std::cos(s.angle), sn = std::sin(s.angle);
  const double rx = c * dx + sn * dy, ry = -sn * dx + c * dy;
  const double r = s.radius;
  switch (s.cls) {
    case 1: return dx * dx + dy * dy <= r * r;
    case 2: return std::abs(dx) <= 0.85 * r && std::abs(dy) <= 0.85 * r;
    case 3: {
      // Equilateral triangle with circumradius 1.25 r, rotated.
      const double R = 1.25 * r;
      for (int k = 0; k < 3; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 3.0;
        if (std::cos(a) * rx + std::sin(a) * ry > R / 2.0) return false;
      }
      return true;
    }
    case 4: {
      const double d2 = dx * dx + dy * dy;
      return d2 <= r * r && d2 >= 0.3 * r * r;
    }
    case 5: return std::abs(rx) + std::abs(ry) <= 1.2 * r;
    case 6: return (std::abs(rx) <= r / 3.0 && std::abs(ry) <= r) || (std::abs(ry) <= r / 3.0 && std::abs(rx) <= r);
    case 7: return (rx * rx) / (r * r) + (ry * ry) / (0.36 * r * r) <= 1.0;
    default: return false;
  }
}

}  // namespace

std::string_view split_name(Split split) { return split == Split::Train ? "train" : "val"; }

void SyntheticSceneSpec::validate() const {
  if (num_classes < 3 || num_classes > kMaxSyntheticClasses) {
    throw UsageError("synthetic scenes support 3.." + std::to_string(kMaxSyntheticClasses) + " classes");
  }
  if (image_size < 16) throw UsageError("synthetic image_size must be >= 16");
  if (min_shapes < 0 || max_shapes < min_shapes) throw UsageError("invalid shape count range");
  if (min_radius < 4.0 || max_radius < min_radius) throw UsageError("shape radius range must start at >= 4 px");
  if (val_modulus < 2) throw UsageError("val_modulus must be >= 2");
}

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06zu", index);
  return buf;
}

Split split_for_id(const std::string& id, int val_modulus) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : id) h = (h ^ ch) * 0x100000001B3ULL;
  return mix64(h) % static_cast<std::uint64_t>(val_modulus) == 0 ? Split::Val : Split::Train;
}

Sample generate_sample(const SyntheticSceneSpec& spec, std::size_t index, int forced_shapes) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.image_size);
  const std::uint64_t base = derive_key({spec.seed, index});

  Sample s;
  s.id = sample_id(index);
  s.split = split_for_id(s.id, spec.val_modulus);
  s.image = make_image(n, n, 3);
  s.label = LabelMap(n, n);

  // Background: two low-saturation colors blended by a fractal texture.
  CounterRng layout(derive_key({base, kStageLayout}));
  auto muted = [&](double lo, double hi) {
    const double v = layout.uniform(lo, hi);
    Rgb c;
    for (double& ch : c) ch = std::clamp(v + layout.uniform(-0.08, 0.08), 0.0, 1.0);
    return c;
  };
  const Rgb bg_a = muted(0.25, 0.75), bg_b = muted(0.25, 0.75);
  const Field bg = fractal_noise(n, n, derive_key({base, kStageBackground}), layout.uniform(6.0, 16.0), 4, 0.55);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double t = 0.5 + spec.background_contrast * 2.0 * (bg.at(y, x) - 0.5);
      for (std::size_t c = 0; c < 3; ++c) s.image.at(y, x, c) = bg_a[c] * (1.0 - t) + bg_b[c] * t;
    }
  }

  const int shapes = forced_shapes >= 0
                         ? forced_shapes
                         : spec.min_shapes + static_cast<int>(layout.below(
                                                 static_cast<std::uint64_t>(spec.max_shapes - spec.min_shapes + 1)));
  std::vector<bool> covered(n * n, false);
  for (int k = 0; k < shapes; ++k) {
    for (int attempt = 0; attempt < spec.placement_retries; ++attempt) {
      Shape shape;
      shape.cls = 1 + static_cast<int>(layout.below(static_cast<std::uint64_t>(spec.num_classes - 1)));
      shape.radius = layout.uniform(spec.min_radius, spec.max_radius);
      shape.cx = layout.uniform(0.0, static_cast<double>(n - 1));
      shape.cy = layout.uniform(0.0, static_cast<double>(n - 1));
      shape.angle = layout.uniform(0.0, 2.0 * std::numbers::pi);

      std::vector<std::size_t> pixels;
      std::size_t overlap = 0;
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
          if (inside(shape, static_cast<double>(x), static_cast<double>(y))) {
            pixels.push_back(y * n + x);
            overlap += covered[y * n + x] ? 1 : 0;
          }
        }
      }
      // Shapes clipped to a sliver by the border or mostly hidden are redrawn.
      const double full_area = 3.0 * shape.radius * shape.radius * 0.5;
      if (static_cast<double>(pixels.size()) < full_area ||
          static_cast<double>(overlap) > spec.max_overlap * static_cast<double>(pixels.size())) {
        continue;
      }

      Rgb color = kClassColors[static_cast<std::size_t>(shape.cls)];
      for (double& ch : color) ch = std::clamp(ch + layout.normal(0.0, spec.color_jitter), 0.0, 1.0);
      const Field tex = fractal_noise(n, n, derive_key({base, kStageShapeTexture, static_cast<std::uint64_t>(k)}),
                                      layout.uniform(3.0, 8.0), 3, 0.5);
      for (std::size_t p : pixels) {
        const double t = spec.foreground_contrast * 2.0 * (tex.values[p] - 0.5);
        for (std::size_t c = 0; c < 3; ++c) s.image[p * 3 + c] = std::clamp(color[c] + t, 0.0, 1.0);
        s.label[p] = shape.cls;
        covered[p] = true;
      }
      ++s.shapes_placed;
      break;
    }
  }

  CounterRng sensor(derive_key({base, kStageSensor}));
  for (double& v : s.image.data()) v = std::clamp(v + sensor.normal(0.0, spec.noise_floor), 0.0, 1.0);
  return s;
}

std::vector<Sample> generate(const SyntheticSceneSpec& spec, std::size_t count, int workers) {
  spec.validate();
  if (count == 0) throw UsageError("generate: count must be >= 1");
  std::vector<Sample> out(count);
  parallel_for(count, workers, [&](std::size_t i) { out[i] = generate_sample(spec, i); });
  return out;
}

std::vector<Sample> select_split(const std::vector<Sample>& samples, Split split) {
  std::vector<Sample> out;
  for (const auto& s : samples) {
    if (s.split == split) out.push_back(s);
  }
  return out;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<Sample>& samples, int num_classes) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "labels");
  std::ostringstream manifest;
  manifest << "segrobust-dataset 1\nclasses " << num_classes << "\n";
  for (const auto& s : samples) {
    write_image(dir / "images" / (s.id + ".ppm"), s.image);
    write_label(dir / "labels" / (s.id + ".pgm"), s.label);
    manifest << s.id << ' ' << split_name(s.split) << '\n';
  }
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << manifest.str();
}

LoadedDataset read_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw DataError("missing manifest.txt in " + dir.string());
  std::string magic;
  int version = 0;
  std::string key;
  LoadedDataset ds;
  if (!(in >> magic >> version) || magic != "segrobust-dataset" || version != 1) {
    throw DataError(dir.string() + "/manifest.txt: unrecognized header");
  }
  if (!(in >> key >> ds.num_classes) || key != "classes" || ds.num_classes < 2) {
    throw DataError(dir.string() + "/manifest.txt: missing 'classes' line");
  }
  std::string id, split;
  std::size_t line = 2;
  while (in >> id >> split) {
    ++line;
    if (split != "train" && split != "val") {
      throw DataError(dir.string() + "/manifest.txt line " + std::to_string(line) + ": bad split '" + split + "'");
    }
    Sample s;
    s.id = id;
    s.split = split == "train" ? Split::Train : Split::Val;
    s.image = read_image(dir / "images" / (id + ".ppm"));
    s.label = read_label(dir / "labels" / (id + ".pgm"), ds.num_classes);
    if (s.label.height() != s.image.dim(0) || s.label.width() != s.image.dim(1)) {
      throw DataError("image and label extents differ for " + id);
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw DataError(dir.string() + "/manifest.txt lists no samples");
  return ds;
}

}  // namespace segrobust
