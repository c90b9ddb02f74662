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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "segrobust/analysis.hpp"
#include "segrobust/config.hpp"
#include "segrobust/evaluation.hpp"
#include "segrobust/report.hpp"

namespace segrobust {

// Shared state of one CLI invocation. `workers` never changes any output.
struct CommandContext {
  RunConfig config;
  int workers = 0;
  bool svg = false;
  std::ostream* log = nullptr;  // progress messages; nullptr silences them
};

// Run directory layout: <out>/<name>/{config.resolved, dataset/, checkpoints/,
// reports/, analysis/}. Each command writes results_<command>.json on success.
std::filesystem::path run_dir(const RunConfig& config);
std::filesystem::path dataset_dir(const RunConfig& config);
std::filesystem::path checkpoint_path(const RunConfig& config, HeadKind head, std::uint64_t seed);

// Generates the synthetic dataset into the run directory.
std::filesystem::path cmd_gen(const CommandContext& ctx);

// Trains one head on the training split of the run's dataset.
std::filesystem::path cmd_train(const CommandContext& ctx, HeadKind head, std::uint64_t seed);

// Writes <output>/<kind>/<severity>/<id>.ppm for every image listed in the
// dataset manifest under `input` and every configured severity.
std::size_t cmd_corrupt(const CommandContext& ctx, const std::filesystem::path& input,
                        const std::filesystem::path& output, std::uint64_t seed);

// Benchmarks checkpoints on the validation split. Files are written to
// reports/<tag>.{txt,csv,severity.csv[,svg]}.
BenchmarkReport cmd_bench(const CommandContext& ctx, const std::vector<std::filesystem::path>& checkpoints,
                          std::uint64_t seed, const std::string& tag);

// Representation diagnostics for one checkpoint into analysis/<tag>/.
RepresentationSummary cmd_analyze(const CommandContext& ctx, const std::filesystem::path& checkpoint,
                                  const std::string& tag);

struct SeedOutcome {
  std::uint64_t seed = 0;
  BenchmarkReport report;
  std::vector<HeadKind> heads;
  std::vector<double> train_miou;  // percent, per head
  std::vector<RepresentationSummary> analysis;

  std::optional<double> noise_mean(HeadKind head) const;
  std::optional<double> corrupted_mean(HeadKind head) const;
};

struct ReproResult {
  std::vector<SeedOutcome> seeds;
};

// gen, then per seed: train every head, bench, analyze. Also writes
// reports/summary.txt and results_repro.json.
ReproResult cmd_repro(const CommandContext& ctx);

// Exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

}  // namespace segrobust
