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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segrobust/corruptions.hpp"
#include "segrobust/dataset.hpp"
#include "segrobust/labels.hpp"
#include "segrobust/model.hpp"

namespace segrobust {

// k x k pixel counts; rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const { return k_; }
  std::uint64_t at(int truth, int pred) const { return counts_[static_cast<std::size_t>(truth * k_ + pred)]; }
  std::uint64_t total() const;

  // Adds one count per pixel; throws UsageError on extent mismatch or an
  // out-of-range class.
  void accumulate(const LabelMap& pred, const LabelMap& truth);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  // TP / (TP + FP + FN); nullopt when the class has an empty union.
  std::optional<double> iou(int cls) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int k_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Mean IOU over classes with a non-empty union, as a fraction in [0, 1];
// nullopt when every class is absent.
std::optional<double> miou(const ConfusionMatrix& cm);
// Same on the 0-100 scale used in reports.
std::optional<double> miou_percent(const ConfusionMatrix& cm);

enum class MscAverage { Probabilities, Logits };

struct MscOptions {
  std::vector<double> scales{0.5, 0.75, 1.0, 1.25, 1.5};
  bool flip = true;
  MscAverage average = MscAverage::Probabilities;

  friend bool operator==(const MscOptions&, const MscOptions&) = default;
};

// Multi-scale (and optionally mirrored) inference: per-scale class
// probabilities, or class-ordered responses when averaging logits, resized
// back to the input resolution and averaged before the argmax.
LabelMap msc_predict(const SegNet& net, const Tensor& image, const MscOptions& options);

struct BenchmarkModel {
  std::string name;
  const SegNet* net = nullptr;
};

struct BenchmarkOptions {
  bool msc = false;
  MscOptions msc_options;
  int workers = 1;
  // Observes every corruption performed (image index, spec); for tests.
  std::function<void(std::size_t, const CorruptionSpec&)> on_corrupt;
};

struct BenchmarkCell {
  std::string model;
  std::optional<CorruptionKind> kind;  // nullopt for the clean (severity 0) row
  int severity = 0;
  bool msc = false;
  double miou = 0.0;  // 0-100; NaN when undefined

  friend bool operator==(const BenchmarkCell& a, const BenchmarkCell& b);
};

class BenchmarkReport {
 public:
  std::vector<std::string> models;
  std::vector<CorruptionKind> kinds;
  std::vector<int> severities;  // corrupted levels, ascending
  bool has_msc = false;
  std::vector<BenchmarkCell> cells;

  std::optional<double> cell(const std::string& model, CorruptionKind kind, int severity, bool msc) const;
  std::optional<double> clean(const std::string& model, bool msc) const;

  // Aggregates are plain means of per-cell mIOU values.
  std::optional<double> severity_mean(const std::string& model, int severity, bool msc) const;  // 0 -> clean
  std::optional<double> kind_mean(const std::string& model, CorruptionKind kind, bool msc) const;
  std::optional<double> group_mean(const std::string& model, CorruptionGroup group, bool msc) const;
  std::optional<double> corrupted_mean(const std::string& model, bool msc) const;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

// Evaluates every model on the clean images and on each (image, spec)
// corruption. Each corrupted image is produced once and shared by all
// models. All models must agree on the class count.
BenchmarkReport run_benchmark(std::span<const BenchmarkModel> models, std::span<const Sample> dataset,
                              std::span<const CorruptionSpec> suite, const BenchmarkOptions& options = {});

// Confusion matrix of plain predictions over a dataset.
ConfusionMatrix evaluate(const SegNet& net, std::span<const Sample> dataset, int workers = 1);

}  // namespace segrobust
