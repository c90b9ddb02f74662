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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "segrobust/dataset.hpp"
#include "segrobust/evaluation.hpp"
#include "segrobust/heads.hpp"
#include "segrobust/trainer.hpp"

namespace segrobust {

// Settings for every command, read from `section.key = value` lines.
struct RunConfig {
  std::string name = "default";
  std::filesystem::path out = "runs";
  std::vector<std::uint64_t> seeds{1, 2, 3};

  SyntheticSceneSpec dataset;
  std::size_t dataset_count = 240;

  // Shared training settings; head, class count and seed are filled in per run.
  TrainConfig train;
  std::vector<HeadKind> heads{HeadKind::SoftmaxBaseline, HeadKind::IBE, HeadKind::SCrIBE};
  // "train.<head>.<key>" -> canonical value, applied on top of `train`.
  std::map<std::string, std::string> head_overrides;

  std::vector<int> severities{1, 2, 3, 4, 5};
  std::size_t bench_images = 0;  // validation images used; 0 means all
  bool msc = true;
  MscOptions msc_options;

  std::size_t analysis_images = 0;  // 0 means all validation images
  bool centered_autocorrelation = false;

  TrainConfig train_config(HeadKind head, std::uint64_t seed) const;
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using Setting = std::pair<std::string, std::string>;

// Parses config text into ordered settings. Blank lines and '#' comments are
// skipped. Throws UsageError on malformed lines.
std::vector<Setting> parse_settings(const std::string& text);

// Applies settings in order. Every unknown key is collected and reported in
// one UsageError; bad values also raise UsageError.
void apply_settings(RunConfig& config, const std::vector<Setting>& settings);

// Defaults, then the file (if any), then the overrides.
RunConfig load_run_config(const std::filesystem::path* file, const std::vector<Setting>& overrides);

// Every key with its canonical value; parsing this text reproduces the config.
std::string resolved_config_text(const RunConfig& config);

// Names of all recognized keys, excluding per-head overrides.
std::vector<std::string> config_keys();

}  // namespace segrobust
