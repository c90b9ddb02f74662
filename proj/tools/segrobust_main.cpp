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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segrobust/commands.hpp"
#include "segrobust/error.hpp"

namespace {

using namespace segrobust;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> name;
  int workers = 0;
  bool svg = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", f.sets, "override one config key, e.g. --set train.total_iters=100");
  cmd->add_option("--seed", f.seed, "run with this single seed (replaces run.seeds)");
  cmd->add_option("--out", f.out, "output root (run.out)");
  cmd->add_option("--name", f.name, "run name (run.name)");
  cmd->add_option("--workers", f.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--svg", f.svg, "also write SVG charts");
  cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

CommandContext make_context(const CommonFlags& f) {
  std::vector<Setting> overrides;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) overrides.emplace_back("run.seeds", std::to_string(*f.seed));
  if (f.out) overrides.emplace_back("run.out", *f.out);
  if (f.name) overrides.emplace_back("run.name", *f.name);
  const fs::path file(f.config_file);
  CommandContext ctx;
  ctx.config = load_run_config(f.config_file.empty() ? nullptr : &file, overrides);
  ctx.workers = f.workers;
  ctx.svg = f.svg;
  ctx.log = f.quiet ? nullptr : &std::cerr;
  return ctx;
}

void print_summary(const BenchmarkReport& report) { std::cout << render_report(report, ReportFormat::Text); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segrobust: segmentation output heads, corruption benchmark and representation diagnostics"};
  app.require_subcommand(1);

  CommonFlags gen_f, train_f, corrupt_f, bench_f, analyze_f, repro_f;
  std::string head = "baseline";
  std::string input, output, tag = "bench", analyze_tag, checkpoint;
  std::vector<std::string> checkpoints;

  auto* gen = app.add_subcommand("gen", "generate the synthetic dataset");
  add_common(gen, gen_f);

  auto* train = app.add_subcommand("train", "train one head");
  add_common(train, train_f);
  train->add_option("--head", head, "baseline, ibe, sigmoid or scribe");

  auto* corrupt_cmd = app.add_subcommand("corrupt", "write corrupted copies of a dataset");
  add_common(corrupt_cmd, corrupt_f);
  corrupt_cmd->add_option("--input", input, "dataset directory")->required();
  corrupt_cmd->add_option("--output", output, "output directory")->required();

  auto* bench = app.add_subcommand("bench", "benchmark checkpoints on clean and corrupted validation images");
  add_common(bench, bench_f);
  bench->add_option("checkpoints", checkpoints, "checkpoint files")->required();
  bench->add_option("--tag", tag, "report file stem");

  auto* analyze = app.add_subcommand("analyze", "autocorrelation and explained variance of one checkpoint");
  add_common(analyze, analyze_f);
  analyze->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  analyze->add_option("--tag", analyze_tag, "analysis subdirectory (default: checkpoint stem)");

  auto* repro = app.add_subcommand("repro", "gen, train every head per seed, bench and analyze");
  add_common(repro, repro_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto ctx = make_context(gen_f);
      std::cout << cmd_gen(ctx).string() << '\n';
    } else if (train->parsed()) {
      const auto ctx = make_context(train_f);
      std::cout << cmd_train(ctx, parse_head(head), ctx.config.seeds.front()).string() << '\n';
    } else if (corrupt_cmd->parsed()) {
      const auto ctx = make_context(corrupt_f);
      const auto n = cmd_corrupt(ctx, input, output, ctx.config.seeds.front());
      std::cout << n << " images written under " << output << '\n';
    } else if (bench->parsed()) {
      const auto ctx = make_context(bench_f);
      std::vector<fs::path> paths(checkpoints.begin(), checkpoints.end());
      print_summary(cmd_bench(ctx, paths, ctx.config.seeds.front(), tag));
    } else if (analyze->parsed()) {
      const auto ctx = make_context(analyze_f);
      const fs::path path(checkpoint);
      const auto summary = cmd_analyze(ctx, path, analyze_tag.empty() ? path.stem().string() : analyze_tag);
      std::cout << "effective dim (95% EV): " << summary.effective_dim_95 << '\n';
    } else if (repro->parsed()) {
      const auto ctx = make_context(repro_f);
      cmd_repro(ctx);
      std::ifstream summary(run_dir(ctx.config) / "reports" / "summary.txt");
      std::cout << summary.rdbuf();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
