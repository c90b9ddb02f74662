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

#include "segrobust/corruptions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "segrobust/error.hpp"
#include "segrobust/noise.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/rng.hpp"

namespace segrobust {

namespace detail {
extern const char* const kSeverityTableText;
}

namespace {

struct KindInfo {
  CorruptionKind kind;
  CorruptionGroup group;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<KindInfo, kCorruptionCount> kKinds{{
    {CorruptionKind::GaussianNoise, CorruptionGroup::Noise, "gaussian_noise", "Gaus."},
    {CorruptionKind::ShotNoise, CorruptionGroup::Noise, "shot_noise", "Sh."},
    {CorruptionKind::ImpulseNoise, CorruptionGroup::Noise, "impulse_noise", "Imp."},
    {CorruptionKind::DefocusBlur, CorruptionGroup::Blur, "defocus_blur", "Dfc."},
    {CorruptionKind::GlassBlur, CorruptionGroup::Blur, "glass_blur", "Gls."},
    {CorruptionKind::MotionBlur, CorruptionGroup::Blur, "motion_blur", "Mtn."},
    {CorruptionKind::ZoomBlur, CorruptionGroup::Blur, "zoom_blur", "Zm."},
    {CorruptionKind::Snow, CorruptionGroup::Weather, "snow", "Sno."},
    {CorruptionKind::Frost, CorruptionGroup::Weather, "frost", "Frs."},
    {CorruptionKind::Fog, CorruptionGroup::Weather, "fog", "Fog"},
    {CorruptionKind::Brightness, CorruptionGroup::Lighting, "brightness", "Bri."},
    {CorruptionKind::Contrast, CorruptionGroup::Lighting, "contrast", "Cnt."},
    {CorruptionKind::ElasticTransform, CorruptionGroup::Spatial, "elastic_transform", "Ela."},
    {CorruptionKind::Pixelate, CorruptionGroup::Spatial, "pixelate", "Pix."},
    {CorruptionKind::JpegCompression, CorruptionGroup::Spatial, "jpeg_compression", "JPEG"},
}};

const KindInfo& info(CorruptionKind kind) { return kKinds[static_cast<std::size_t>(kind)]; }

// +1: larger values degrade more; -1: smaller values degrade more.
struct ParamInfo {
  CorruptionKind kind;
  std::string_view param;
  int direction;
};

constexpr ParamInfo kParams[] = {
    {CorruptionKind::GaussianNoise, "sigma", +1},
    {CorruptionKind::ShotNoise, "rate", -1},
    {CorruptionKind::ImpulseNoise, "amount", +1},
    {CorruptionKind::DefocusBlur, "radius", +1},
    {CorruptionKind::DefocusBlur, "alias_sigma", +1},
    {CorruptionKind::GlassBlur, "sigma", +1},
    {CorruptionKind::GlassBlur, "max_delta", +1},
    {CorruptionKind::GlassBlur, "iterations", +1},
    {CorruptionKind::MotionBlur, "length", +1},
    {CorruptionKind::ZoomBlur, "max_zoom", +1},
    {CorruptionKind::Snow, "density", +1},
    {CorruptionKind::Snow, "flake_length", +1},
    {CorruptionKind::Snow, "whiten", +1},
    {CorruptionKind::Frost, "coverage", +1},
    {CorruptionKind::Fog, "strength", +1},
    {CorruptionKind::Fog, "decay", -1},
    {CorruptionKind::Brightness, "shift", +1},
    {CorruptionKind::Contrast, "factor", -1},
    {CorruptionKind::ElasticTransform, "amplitude", +1},
    {CorruptionKind::ElasticTransform, "smoothing", -1},
    {CorruptionKind::Pixelate, "factor", -1},
    {CorruptionKind::JpegCompression, "quality", -1},
};

std::string row_key(CorruptionKind kind, std::string_view param) {
  return std::string(corruption_name(kind)) + "." + std::string(param);
}

// Stage identifiers keep independent random streams apart.
enum Stage : std::uint64_t { kNoise = 1, kSalt, kGlass, kAngle, kSnowLayer, kFrostLayer, kFogLayer, kElasticX, kElasticY };

void clamp01(Tensor& t) {
  for (double& v : t.data()) v = std::clamp(v, 0.0, 1.0);
}

// Bilinear sample with clamp-to-edge addressing.
double sample(const Tensor& img, double y, double x, std::size_t c) {
  const double h = static_cast<double>(img.dim(0) - 1), w = static_cast<double>(img.dim(1) - 1);
  y = std::clamp(y, 0.0, h);
  x = std::clamp(x, 0.0, w);
  const auto y0 = static_cast<std::size_t>(y), x0 = static_cast<std::size_t>(x);
  const std::size_t y1 = std::min(y0 + 1, img.dim(0) - 1), x1 = std::min(x0 + 1, img.dim(1) - 1);
  const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
  const double bottom = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
  return top * (1 - fy) + bottom * fy;
}

// Correlates every channel with an odd-sized kernel, clamping at the border.
Tensor filter(const Tensor& img, const Field& kernel) {
  const auto h = static_cast<std::ptrdiff_t>(img.dim(0)), w = static_cast<std::ptrdiff_t>(img.dim(1));
  const std::size_t channels = img.dim(2);
  const auto ry = static_cast<std::ptrdiff_t>(kernel.height / 2), rx = static_cast<std::ptrdiff_t>(kernel.width / 2);
  Tensor out(img.shape());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy) {
        const auto sy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(y + dy, 0, h - 1));
        for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
          const double k = kernel.at(static_cast<std::size_t>(dy + ry), static_cast<std::size_t>(dx + rx));
          if (k == 0.0) continue;
          const auto sx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(x + dx, 0, w - 1));
          for (std::size_t c = 0; c < channels; ++c) {
            out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c) += k * img.at(sy, sx, c);
          }
        }
      }
    }
  }
  return out;
}

void normalize_kernel(Field& k) {
  double s = 0.0;
  for (double v : k.values) s += v;
  for (double& v : k.values) v /= s;
}

Field gaussian_kernel(double sigma) {
  const auto r = static_cast<std::size_t>(std::ceil(3.0 * std::max(sigma, 1e-3)));
  Field k{2 * r + 1, 2 * r + 1, std::vector<double>((2 * r + 1) * (2 * r + 1))};
  for (std::size_t y = 0; y < k.height; ++y) {
    for (std::size_t x = 0; x < k.width; ++x) {
      const double dy = static_cast<double>(y) - static_cast<double>(r);
      const double dx = static_cast<double>(x) - static_cast<double>(r);
      k.at(y, x) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  normalize_kernel(k);
  return k;
}

Tensor gaussian_blur(const Tensor& img, double sigma) { return filter(img, gaussian_kernel(sigma)); }

Field smooth_field(const Field& f, double sigma) {
  Tensor t({f.height, f.width, 1}, f.values);
  Tensor s = gaussian_blur(t, sigma);
  return Field{f.height, f.width, s.values()};
}

// Uniform line of the given length through the kernel centre at `angle`.
Field line_kernel(double length, double angle) {
  const auto r = static_cast<std::size_t>(std::ceil(length / 2.0));
  Field k{2 * r + 1, 2 * r + 1, std::vector<double>((2 * r + 1) * (2 * r + 1), 0.0)};
  const int steps = 4 * static_cast<int>(std::ceil(length)) + 1;
  for (int i = 0; i < steps; ++i) {
    const double t = (static_cast<double>(i) / (steps - 1) - 0.5) * (length - 1.0);
    const double px = static_cast<double>(r) + t * std::cos(angle);
    const double py = static_cast<double>(r) + t * std::sin(angle);
    const auto x0 = static_cast<std::size_t>(std::floor(px)), y0 = static_cast<std::size_t>(std::floor(py));
    const double fx = px - static_cast<double>(x0), fy = py - static_cast<double>(y0);
    auto splat = [&](std::size_t y, std::size_t x, double wgt) {
      if (y < k.height && x < k.width) k.at(y, x) += wgt;
    };
    splat(y0, x0, (1 - fx) * (1 - fy));
    splat(y0, x0 + 1, fx * (1 - fy));
    splat(y0 + 1, x0, (1 - fx) * fy);
    splat(y0 + 1, x0 + 1, fx * fy);
  }
  normalize_kernel(k);
  return k;
}

double luminance(const Tensor& img, std::size_t y, std::size_t x) {
  return 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
}

Tensor gaussian_noise(const Tensor& img, double sigma, std::uint64_t seed) {
  Tensor out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    CounterRng rng(derive_key({seed, kNoise, i}));
    out[i] += rng.normal(0.0, sigma);
  }
  return out;
}

Tensor shot_noise(const Tensor& img, double rate, std::uint64_t seed) {
  Tensor out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    CounterRng rng(derive_key({seed, kNoise, i}));
    out[i] = static_cast<double>(rng.poisson(std::clamp(img[i], 0.0, 1.0) * rate)) / rate;
  }
  return out;
}

Tensor impulse_noise(const Tensor& img, double amount, std::uint64_t seed) {
  Tensor out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    CounterRng rng(derive_key({seed, kSalt, i}));
    if (rng.uniform() < amount) out[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
  }
  return out;
}

Tensor defocus_blur(const Tensor& img, double radius, double alias_sigma) {
  const auto r = static_cast<std::size_t>(std::ceil(radius));
  Field disk{2 * r + 1, 2 * r + 1, std::vector<double>((2 * r + 1) * (2 * r + 1), 0.0)};
  for (std::size_t y = 0; y < disk.height; ++y) {
    for (std::size_t x = 0; x < disk.width; ++x) {
      const double dy = static_cast<double>(y) - static_cast<double>(r);
      const double dx = static_cast<double>(x) - static_cast<double>(r);
      disk.at(y, x) = dx * dx + dy * dy <= radius * radius ? 1.0 : 0.0;
    }
  }
  normalize_kernel(disk);
  return gaussian_blur(filter(img, disk), alias_sigma);
}

Tensor glass_blur(const Tensor& img, double sigma, int max_delta, int iterations, std::uint64_t seed) {
  Tensor out = gaussian_blur(img, sigma);
  const auto h = static_cast<long>(img.dim(0)), w = static_cast<long>(img.dim(1));
  const long d = max_delta;
  for (int it = 0; it < iterations; ++it) {
    // Sequential local swaps, bottom-right to top-left.
    for (long y = h - d - 1; y >= d; --y) {
      for (long x = w - d - 1; x >= d; --x) {
        CounterRng rng(derive_key({seed, kGlass, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(y),
                                   static_cast<std::uint64_t>(x)}));
        const long dx = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * d))) - d;
        const long dy = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * d))) - d;
        const long ty = y + dy, tx = x + dx;
        for (std::size_t c = 0; c < img.dim(2); ++c) {
          std::swap(out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c),
                    out.at(static_cast<std::size_t>(ty), static_cast<std::size_t>(tx), c));
        }
      }
    }
  }
  return gaussian_blur(out, sigma);
}

Tensor motion_blur(const Tensor& img, double length, std::uint64_t seed) {
  CounterRng rng(derive_key({seed, kAngle}));
  const double angle = rng.uniform(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
  return filter(img, line_kernel(length, angle));
}

// Centre crop of 1/zoom the size, scaled back up.
Tensor zoom(const Tensor& img, double factor) {
  Tensor out(img.shape());
  const double cy = static_cast<double>(img.dim(0) - 1) / 2.0, cx = static_cast<double>(img.dim(1) - 1) / 2.0;
  for (std::size_t y = 0; y < img.dim(0); ++y) {
    for (std::size_t x = 0; x < img.dim(1); ++x) {
      const double sy = cy + (static_cast<double>(y) - cy) / factor;
      const double sx = cx + (static_cast<double>(x) - cx) / factor;
      for (std::size_t c = 0; c < img.dim(2); ++c) out.at(y, x, c) = sample(img, sy, sx, c);
    }
  }
  return out;
}

Tensor zoom_blur(const Tensor& img, double max_zoom) {
  constexpr double kStep = 0.01;
  Tensor acc = img;
  int count = 1;
  for (int i = 1;; ++i) {
    const double z = 1.0 + kStep * i;
    if (z > max_zoom + 1e-9) break;
    acc = add(acc, zoom(img, z));
    ++count;
  }
  return scale(acc, 1.0 / count);
}

Tensor snow(const Tensor& img, double density, double flake_length, double whiten, std::uint64_t seed) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  Tensor flakes({h, w, 1});
  for (std::size_t i = 0; i < h * w; ++i) {
    CounterRng rng(derive_key({seed, kSnowLayer, i}));
    if (rng.uniform() < density) flakes[i] = rng.uniform(0.7, 1.0);
  }
  CounterRng angle_rng(derive_key({seed, kAngle}));
  const double angle = std::numbers::pi / 2.0 + angle_rng.uniform(-0.6, 0.6);
  Tensor streaks = filter(flakes, line_kernel(flake_length, angle));
  // Undo the line kernel's dilution so a streak keeps the flake's brightness.
  for (double& v : streaks.data()) v = std::min(1.0, v * flake_length * 0.8);

  Tensor out = img;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double lift = luminance(img, y, x) * 1.5 + 0.5;
      const double layer = streaks.at(y, x, 0) + streaks.at(h - 1 - y, w - 1 - x, 0);
      for (std::size_t c = 0; c < img.dim(2); ++c) {
        const double v = img.at(y, x, c);
        out.at(y, x, c) = (1.0 - whiten) * v + whiten * std::max(v, lift) + layer;
      }
    }
  }
  return out;
}

// Procedural stand-in for photographic frost: ridged fractal noise, squared
// to leave sparse bright crystals, tinted pale blue.
// Convex blend toward a bright, blue-tinted crystal layer. Every pixel moves
// a fixed fraction of its distance to the layer, so the deviation from the
// clean image grows with coverage pixel by pixel.
Tensor frost(const Tensor& img, double coverage, std::uint64_t seed) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  const Field base = fractal_noise(h, w, derive_key({seed, kFrostLayer}), 12.0, 4, 0.6);
  constexpr double kTint[3] = {0.86, 0.92, 1.0};
  Tensor out = img;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double ridge = 1.0 - std::abs(2.0 * base.at(y, x) - 1.0);
      const double layer = 0.45 + 0.55 * ridge * ridge;
      for (std::size_t c = 0; c < img.dim(2); ++c) {
        out.at(y, x, c) = (1.0 - coverage) * img.at(y, x, c) + coverage * layer * kTint[c % 3];
      }
    }
  }
  return out;
}

Tensor fog(const Tensor& img, double strength, double decay, std::uint64_t seed) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  const Field plasma = plasma_fractal(h, w, derive_key({seed, kFogLayer}), decay);
  double max_val = 0.0;
  for (double v : img.data()) max_val = std::max(max_val, v);
  Tensor out = img;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < img.dim(2); ++c) {
        out.at(y, x, c) = (img.at(y, x, c) + strength * plasma.at(y, x)) * max_val / (max_val + strength);
      }
    }
  }
  return out;
}

Tensor elastic(const Tensor& img, double amplitude, double smoothing, std::uint64_t seed) {
  const std::size_t h = img.dim(0), w = img.dim(1);
  auto displacement = [&](std::uint64_t stage) {
    Field f{h, w, std::vector<double>(h * w)};
    for (std::size_t i = 0; i < h * w; ++i) {
      CounterRng rng(derive_key({seed, stage, i}));
      f.values[i] = rng.uniform(-1.0, 1.0);
    }
    f = smooth_field(f, smoothing);
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    for (double& v : f.values) v = peak > 0.0 ? amplitude * v / peak : 0.0;
    return f;
  };
  const Field dx = displacement(kElasticX), dy = displacement(kElasticY);
  Tensor out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double sy = static_cast<double>(y) + dy.at(y, x), sx = static_cast<double>(x) + dx.at(y, x);
      for (std::size_t c = 0; c < img.dim(2); ++c) out.at(y, x, c) = sample(img, sy, sx, c);
    }
  }
  return out;
}

Tensor pixelate(const Tensor& img, double factor) {
  const std::size_t h = img.dim(0), w = img.dim(1), ch = img.dim(2);
  const auto sh = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(h) * factor)));
  const auto sw = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(w) * factor)));
  // Box downscale: each small pixel averages the source pixels whose centres fall inside it.
  Tensor small({sh, sw, ch});
  std::vector<double> counts(sh * sw, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t by = y * sh / h;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t bx = x * sw / w;
      counts[by * sw + bx] += 1.0;
      for (std::size_t c = 0; c < ch; ++c) small.at(by, bx, c) += img.at(y, x, c);
    }
  }
  for (std::size_t i = 0; i < sh * sw; ++i) {
    for (std::size_t c = 0; c < ch; ++c) small[i * ch + c] /= counts[i];
  }
  Tensor out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) out.at(y, x, c) = small.at(y * sh / h, x * sw / w, c);
    }
  }
  return out;
}

}  // namespace

const std::array<CorruptionKind, kCorruptionCount>& all_corruptions() {
  static const std::array<CorruptionKind, kCorruptionCount> kinds = [] {
    std::array<CorruptionKind, kCorruptionCount> out{};
    for (std::size_t i = 0; i < kCorruptionCount; ++i) out[i] = kKinds[i].kind;
    return out;
  }();
  return kinds;
}

CorruptionGroup group_of(CorruptionKind kind) { return info(kind).group; }
std::string_view corruption_name(CorruptionKind kind) { return info(kind).name; }
std::string_view corruption_label(CorruptionKind kind) { return info(kind).label; }

std::string_view group_name(CorruptionGroup group) {
  switch (group) {
    case CorruptionGroup::Noise: return "Noise";
    case CorruptionGroup::Blur: return "Blur";
    case CorruptionGroup::Weather: return "Weather";
    case CorruptionGroup::Lighting: return "Lighting";
    case CorruptionGroup::Spatial: return "Spatial";
  }
  return "?";
}

CorruptionKind parse_corruption(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw UsageError("unknown corruption '" + std::string(name) + "'");
}

SeverityTable SeverityTable::parse(const std::string& text) {
  SeverityTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "severity table line " + std::to_string(lineno);
    if (eq == std::string::npos) throw DataError(where + ": expected '<kind>.<param> = v1 .. v5'");
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    key.erase(0, key.find_first_not_of(" \t"));
    const bool known = std::any_of(std::begin(kParams), std::end(kParams),
                                   [&](const ParamInfo& p) { return row_key(p.kind, p.param) == key; });
    if (!known) throw DataError(where + ": unknown parameter '" + key + "'");
    if (table.rows_.count(key)) throw DataError(where + ": duplicate parameter '" + key + "'");
    std::istringstream values(line.substr(eq + 1));
    std::array<double, kMaxSeverity> row{};
    for (double& v : row) {
      if (!(values >> v)) throw DataError(where + ": '" + key + "' needs 5 values");
    }
    std::string extra;
    if (values >> extra) throw DataError(where + ": '" + key + "' has more than 5 values");
    table.rows_[key] = row;
  }

  for (const auto& k : kKinds) {
    bool strict_somewhere = false;
    for (const auto& p : kParams) {
      if (p.kind != k.kind) continue;
      const std::string key = row_key(p.kind, p.param);
      const auto it = table.rows_.find(key);
      if (it == table.rows_.end()) throw DataError("severity table is missing '" + key + "'");
      bool strict = true;
      for (int s = 1; s < kMaxSeverity; ++s) {
        const double step = p.direction * (it->second[static_cast<std::size_t>(s)] - it->second[static_cast<std::size_t>(s - 1)]);
        if (step < 0.0) throw DataError("severity table row '" + key + "' is not monotone in its degradation direction");
        strict = strict && step > 0.0;
      }
      strict_somewhere = strict_somewhere || strict;
    }
    if (!strict_somewhere) {
      throw DataError("severity table: no parameter of '" + std::string(k.name) + "' is strictly monotone");
    }
  }
  return table;
}

SeverityTable SeverityTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open severity table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

double SeverityTable::get(CorruptionKind kind, std::string_view param, int severity) const {
  if (severity < 1 || severity > kMaxSeverity) throw UsageError("severity must be in 1..5");
  const auto it = rows_.find(row_key(kind, param));
  if (it == rows_.end()) throw UsageError("no severity parameter " + row_key(kind, param));
  return it->second[static_cast<std::size_t>(severity - 1)];
}

std::vector<std::string> SeverityTable::parameters(CorruptionKind kind) const {
  std::vector<std::string> out;
  for (const auto& p : kParams) {
    if (p.kind == kind) out.emplace_back(p.param);
  }
  return out;
}

std::string SeverityTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [key, row] : rows_) {
    out << key << " =";
    for (double v : row) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

const SeverityTable& default_severity_table() {
  static const SeverityTable table = SeverityTable::parse(detail::kSeverityTableText);
  return table;
}

Tensor corrupt(const Tensor& image, const CorruptionSpec& spec, const SeverityTable& table) {
  if (spec.severity < 0 || spec.severity > kMaxSeverity) {
    throw UsageError("severity " + std::to_string(spec.severity) + " outside 0..5");
  }
  if (image.rank() != 3) throw UsageError("corrupt expects an H x W x C image");
  if (spec.severity == 0) return image;

  const int s = spec.severity;
  auto p = [&](std::string_view name) { return table.get(spec.kind, name, s); };
  Tensor out;
  switch (spec.kind) {
    case CorruptionKind::GaussianNoise: out = gaussian_noise(image, p("sigma"), spec.seed); break;
    case CorruptionKind::ShotNoise: out = shot_noise(image, p("rate"), spec.seed); break;
    case CorruptionKind::ImpulseNoise: out = impulse_noise(image, p("amount"), spec.seed); break;
    case CorruptionKind::DefocusBlur: out = defocus_blur(image, p("radius"), p("alias_sigma")); break;
    case CorruptionKind::GlassBlur:
      out = glass_blur(image, p("sigma"), static_cast<int>(p("max_delta")), static_cast<int>(p("iterations")), spec.seed);
      break;
    case CorruptionKind::MotionBlur: out = motion_blur(image, p("length"), spec.seed); break;
    case CorruptionKind::ZoomBlur: out = zoom_blur(image, p("max_zoom")); break;
    case CorruptionKind::Snow: out = snow(image, p("density"), p("flake_length"), p("whiten"), spec.seed); break;
    case CorruptionKind::Frost: out = frost(image, p("coverage"), spec.seed); break;
    case CorruptionKind::Fog: out = fog(image, p("strength"), p("decay"), spec.seed); break;
    case CorruptionKind::Brightness: {
      out = image;
      const double shift = p("shift");
      for (double& v : out.data()) v += shift;
      break;
    }
    case CorruptionKind::Contrast: {
      out = image;
      const double m = mean(image), f = p("factor");
      for (double& v : out.data()) v = (v - m) * f + m;
      break;
    }
    case CorruptionKind::ElasticTransform: out = elastic(image, p("amplitude"), p("smoothing"), spec.seed); break;
    case CorruptionKind::Pixelate: out = pixelate(image, p("factor")); break;
    case CorruptionKind::JpegCompression: out = jpeg_roundtrip(image, static_cast<int>(p("quality"))); break;
  }
  clamp01(out);
  return out;
}

std::vector<CorruptionSpec> corruption_suite(const std::vector<int>& severities, std::uint64_t base_seed) {
  for (int s : severities) {
    if (s < 1 || s > kMaxSeverity) throw UsageError("suite severities must be in 1..5");
  }
  std::vector<CorruptionSpec> out;
  for (CorruptionKind kind : all_corruptions()) {
    for (int s : severities) {
      out.push_back({kind, s,
                     derive_key({base_seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(s)})});
    }
  }
  return out;
}

CorruptionSpec spec_for_image(const CorruptionSpec& spec, std::size_t image_index) {
  return {spec.kind, spec.severity, derive_key({spec.seed, 0x1A6EULL, image_index})};
}

}  // namespace segrobust
