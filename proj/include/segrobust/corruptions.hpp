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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segrobust/tensor.hpp"

namespace segrobust {

enum class CorruptionGroup { Noise, Blur, Weather, Lighting, Spatial };

enum class CorruptionKind {
  GaussianNoise,
  ShotNoise,
  ImpulseNoise,
  DefocusBlur,
  GlassBlur,
  MotionBlur,
  ZoomBlur,
  Snow,
  Frost,
  Fog,
  Brightness,
  Contrast,
  ElasticTransform,
  Pixelate,
  JpegCompression,
};

inline constexpr std::size_t kCorruptionCount = 15;
inline constexpr int kMaxSeverity = 5;

// Benchmark column order: Noise, Blur, Weather, Lighting, Spatial.
const std::array<CorruptionKind, kCorruptionCount>& all_corruptions();
inline constexpr std::array<CorruptionGroup, 5> kAllGroups{CorruptionGroup::Noise, CorruptionGroup::Blur,
                                                          CorruptionGroup::Weather, CorruptionGroup::Lighting,
                                                          CorruptionGroup::Spatial};

CorruptionGroup group_of(CorruptionKind kind);
std::string_view corruption_name(CorruptionKind kind);    // e.g. "gaussian_noise"
std::string_view corruption_label(CorruptionKind kind);   // short table header, e.g. "Gaus."
std::string_view group_name(CorruptionGroup group);        // e.g. "Noise"
CorruptionKind parse_corruption(std::string_view name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::GaussianNoise;
  int severity = 0;  // 0 is the identity
  std::uint64_t seed = 0;

  friend bool operator==(const CorruptionSpec&, const CorruptionSpec&) = default;
};

// Per-(kind, parameter) rows of five values, one per severity level.
class SeverityTable {
 public:
  // Parses "<kind>.<param> = v1 v2 v3 v4 v5" lines. Throws DataError on
  // unknown or missing parameters, wrong arity, or a row that is not
  // monotone in its degradation direction.
  static SeverityTable parse(const std::string& text);
  static SeverityTable load(const std::filesystem::path& path);

  double get(CorruptionKind kind, std::string_view param, int severity) const;
  std::vector<std::string> parameters(CorruptionKind kind) const;
  std::string to_text() const;

 private:
  std::map<std::string, std::array<double, kMaxSeverity>> rows_;
};

// Table compiled from data/severity_table.txt.
const SeverityTable& default_severity_table();

// Applies the corruption; output is clamped to [0, 1]. Severity 0 returns the
// input unchanged. All randomness is keyed by spec.seed.
Tensor corrupt(const Tensor& image, const CorruptionSpec& spec, const SeverityTable& table = default_severity_table());

// 15 x |severities| specs ordered by kind, then by severity as given. Seeds
// are derived from (base_seed, kind, severity).
std::vector<CorruptionSpec> corruption_suite(const std::vector<int>& severities, std::uint64_t base_seed = 0);

// Seed used for one image under a suite spec, so every image sees its own
// noise realization while staying reproducible.
CorruptionSpec spec_for_image(const CorruptionSpec& spec, std::size_t image_index);

// 8x8 DCT baseline JPEG round trip (YCbCr, 4:2:0 chroma, IJG quality scaling)
// applied in memory. Quality in [1, 100].
Tensor jpeg_roundtrip(const Tensor& image, int quality);

}  // namespace segrobust
