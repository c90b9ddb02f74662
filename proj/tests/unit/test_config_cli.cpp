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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "segrobust/commands.hpp"
#include "segrobust/config.hpp"
#include "segrobust/error.hpp"
#include "segrobust/trainer.hpp"

namespace segrobust {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, ParsesKeyValuesCommentsAndOverrides) {
  RunConfig c;
  apply_settings(c, parse_settings("# comment\n\nrun.name = demo  # trailing\ntrain.total_iters = 42\n"
                                   "bench.severities = 1, 3\ntrain.ibe.base_lr = 0.5\nbench.msc = false\n"));
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.train.total_iters, 42);
  EXPECT_EQ(c.severities, (std::vector<int>{1, 3}));
  EXPECT_FALSE(c.msc);
  EXPECT_EQ(c.train_config(HeadKind::IBE, 7).base_lr, 0.5);
  EXPECT_EQ(c.train_config(HeadKind::SCrIBE, 7).base_lr, c.train.base_lr);
  EXPECT_EQ(c.train_config(HeadKind::IBE, 7).seed, 7u);
}

TEST(Config, UnknownKeysAreAllListed) {
  RunConfig c;
  try {
    apply_settings(c, parse_settings("bogus.one = 1\ntrain.total_iters = 5\ntrain.nothead.base_lr = 2\n"));
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bogus.one"), std::string::npos);
    EXPECT_NE(msg.find("train.nothead.base_lr"), std::string::npos);
  }
  EXPECT_THROW(parse_settings("no equals sign\n"), UsageError);
  EXPECT_THROW(apply_settings(c, {{"train.total_iters", "ten"}}), UsageError);
}

TEST(Config, ResolvedTextReproducesConfig) {
  RunConfig c;
  apply_settings(c, {{"train.scale_lo", "0.8125"}, {"run.seeds", "4,5"}, {"bench.msc_average", "logits"},
                     {"train.scribe.total_iters", "17"}, {"dataset.noise_floor", "0.1"}});
  RunConfig back;
  apply_settings(back, parse_settings(resolved_config_text(c)));
  EXPECT_EQ(back, c);
  EXPECT_EQ(resolved_config_text(back), resolved_config_text(c));
}

TEST(Config, ValidationRejectsBadValues) {
  RunConfig c;
  c.severities = {0};
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.heads.clear();
  EXPECT_THROW(c.validate(), UsageError);
  EXPECT_NO_THROW(RunConfig{}.validate());
}

CommandContext tiny_context(const std::string& name) {
  CommandContext ctx;
  apply_settings(ctx.config, parse_settings("dataset.count = 12\ndataset.image_size = 24\ndataset.min_radius = 4\n"
                                            "dataset.max_radius = 7\ntrain.total_iters = 3\ntrain.batch_size = 2\n"
                                            "train.crop_size = 16\nbench.images = 1\nbench.severities = 1\n"
                                            "bench.msc_scales = 1\nrun.seeds = 2\n"));
  ctx.config.out = fs::temp_directory_path() / "segrobust_cmd_test";
  ctx.config.name = name;
  fs::remove_all(run_dir(ctx.config));
  return ctx;
}

TEST(Commands, PipelineWritesLayoutAndManifests) {
  const CommandContext ctx = tiny_context("pipeline");
  cmd_gen(ctx);
  const fs::path ck = cmd_train(ctx, HeadKind::SCrIBE, 2);
  EXPECT_TRUE(fs::exists(ck));
  const BenchmarkReport r = cmd_bench(ctx, {ck}, 2, "bench");
  EXPECT_EQ(r.models, (std::vector<std::string>{"scribe"}));
  cmd_analyze(ctx, ck, "scribe");
  const fs::path dir = run_dir(ctx.config);
  for (const char* f : {"config.resolved", "results_gen.json", "results_train.json", "results_bench.json",
                        "results_analyze.json", "reports/bench.csv", "reports/bench.txt", "reports/bench.severity.csv",
                        "analysis/scribe/ev.csv", "analysis/scribe/off_diagonal.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "INCOMPLETE"));
  EXPECT_EQ(parse_cells_csv(read_file(dir / "reports/bench.csv")), r);

  RunConfig back;
  apply_settings(back, parse_settings(read_file(dir / "config.resolved")));
  EXPECT_EQ(back, ctx.config);

  const fs::path corrupted = dir / "corrupted";
  EXPECT_EQ(cmd_corrupt(ctx, dataset_dir(ctx.config), corrupted, 2), 12u * 15u);
  EXPECT_TRUE(fs::exists(corrupted / "fog" / "1" / "s000000.ppm"));
  fs::remove_all(dir);
}

TEST(Commands, TrainWithZeroItersSavesInitialization) {
  CommandContext ctx = tiny_context("zero");
  ctx.config.train.total_iters = 0;
  cmd_gen(ctx);
  const Checkpoint ck = load_checkpoint(cmd_train(ctx, HeadKind::IBE, 2));
  EXPECT_EQ(ck.net, make_segnet(HeadKind::IBE, 4, 2));
  fs::remove_all(run_dir(ctx.config));
}

TEST(Commands, FailedCommandLeavesIncompleteMarker) {
  const CommandContext ctx = tiny_context("failed");
  EXPECT_THROW(cmd_train(ctx, HeadKind::IBE, 2), DataError);  // no dataset yet
  EXPECT_TRUE(fs::exists(run_dir(ctx.config) / "INCOMPLETE"));
  EXPECT_THROW(cmd_bench(ctx, {run_dir(ctx.config) / "missing.ckpt"}, 2, "b"), UsageError);
  fs::remove_all(run_dir(ctx.config));
}

TEST(Commands, ReproIsByteIdenticalAcrossWorkerCounts) {
  CommandContext a = tiny_context("repro_a");
  CommandContext b = tiny_context("repro_b");
  b.workers = 3;
  cmd_repro(a);
  cmd_repro(b);
  const fs::path da = run_dir(a.config), db = run_dir(b.config);
  for (const auto& entry : fs::recursive_directory_iterator(da / "reports")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), da);
    EXPECT_EQ(read_file(entry.path()), read_file(db / rel)) << rel;
  }
  EXPECT_EQ(read_file(da / "analysis/scribe_s2/ev.csv"), read_file(db / "analysis/scribe_s2/ev.csv"));
  fs::remove_all(da);
  fs::remove_all(db);
}

#ifdef SEGROBUST_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEGROBUST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesDistinguishUsageDataAndSuccess) {
  const fs::path out = fs::temp_directory_path() / "segrobust_cli_test";
  fs::remove_all(out);
  const std::string common = "--quiet --out " + out.string() + " --name t";
  EXPECT_EQ(run_cli("gen " + common + " --set bogus.key=1"), kExitUsage);
  EXPECT_EQ(run_cli("no-such-command"), kExitUsage);
  EXPECT_EQ(run_cli("train " + common), kExitData);  // no dataset generated yet
  EXPECT_EQ(run_cli("gen " + common + " --set dataset.count=4 --set dataset.image_size=24 --set dataset.min_radius=4 "
                    "--set dataset.max_radius=7"),
            kExitOk);
  // A huge learning rate makes the loss blow up.
  EXPECT_EQ(run_cli("train " + common + " --set dataset.count=4 --set dataset.image_size=24 --set dataset.min_radius=4 "
                    "--set dataset.max_radius=7 --set train.total_iters=30 --set train.crop_size=16 "
                    "--set train.base_lr=1e6 --set train.classifier_lr=1e6"),
            kExitNumerical);
  fs::remove_all(out);
}
#endif

}  // namespace
}  // namespace segrobust
