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
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segrobust/dataset.hpp"
#include "segrobust/model.hpp"
#include "segrobust/rng.hpp"

namespace segrobust {

struct TrainConfig {
  HeadKind head = HeadKind::SoftmaxBaseline;
  int num_classes = 4;
  double base_lr = 0.01;        // hidden layers
  double classifier_lr = 0.1;   // final layer
  double weight_decay = 5e-5;
  double momentum = 0.9;
  int batch_size = 8;
  int total_iters = 3000;
  int crop_size = 64;
  double scale_lo = 0.75;
  double scale_hi = 1.25;
  std::uint64_t seed = 1;
  double poly_power = 0.9;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Poly schedule multiplier (1 - iter / total)^power.
double poly_factor(int iter, int total_iters, double power);
// base_lr * poly_factor(iter, ...). Throws UsageError outside [0, total_iters].
double poly_lr(int iter, const TrainConfig& cfg);

// Random rescale (bilinear image, nearest label) followed by a random
// crop_size x crop_size crop. Images smaller than the crop after scaling are
// padded with zeros and background labels at the bottom/right.
std::pair<Tensor, LabelMap> augment(const Tensor& image, const LabelMap& label, const TrainConfig& cfg,
                                    CounterRng& rng);

struct Checkpoint {
  SegNet net;
  TrainConfig config;
  int iteration = 0;
  std::vector<double> loss_history;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct TrainOptions {
  int workers = 1;
  // Called after each iteration with (iteration, loss).
  std::function<void(int, double)> progress;
};

// SGD with momentum and decoupled weight decay on kernels. Deterministic in
// cfg.seed regardless of the worker count. Throws NumericalError when the
// loss becomes non-finite.
Checkpoint train(const TrainConfig& cfg, std::span<const Sample> dataset, const TrainOptions& options = {});

// Text container; all reals are written as hexadecimal floating point so the
// round trip is bit-exact. See docs/formats.md.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace segrobust
