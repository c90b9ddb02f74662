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

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

#include "segrobust/error.hpp"
#include "segrobust/evaluation.hpp"
#include "test_util.hpp"

namespace segrobust {
namespace {

// Per-class IOU from explicit pixel index sets.
std::optional<double> set_oracle_miou(const LabelMap& pred, const LabelMap& truth, int k) {
  double total = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    std::set<std::size_t> p, t;
    for (std::size_t i = 0; i < pred.classes().size(); ++i) {
      if (pred.classes()[i] == c) p.insert(i);
      if (truth.classes()[i] == c) t.insert(i);
    }
    std::set<std::size_t> uni = p;
    uni.insert(t.begin(), t.end());
    if (uni.empty()) continue;
    std::size_t inter = 0;
    for (std::size_t i : p) inter += t.count(i);
    total += static_cast<double>(inter) / static_cast<double>(uni.size());
    ++present;
  }
  if (present == 0) return std::nullopt;
  return total / present;
}

TEST(ConfusionMatrix, SpecExamples) {
  ConfusionMatrix cm(2);
  cm.accumulate(LabelMap(2, 2, 1), LabelMap(2, 2, 1));
  EXPECT_EQ(cm.at(1, 1), 4u);
  EXPECT_EQ(cm.total(), 4u);
  const ConfusionMatrix before = cm;
  cm.accumulate(LabelMap(0, 0), LabelMap(0, 0));
  EXPECT_EQ(cm, before);
  EXPECT_THROW(cm.accumulate(LabelMap(2, 2), LabelMap(2, 3)), UsageError);
  EXPECT_THROW(cm.accumulate(LabelMap(1, 1, 2), LabelMap(1, 1, 0)), UsageError);
}

TEST(ConfusionMatrix, MatchesPerPixelCounting) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const LabelMap p = testing::random_labels(8, 8, 5, s), t = testing::random_labels(8, 8, 5, 1000 + s);
    ConfusionMatrix cm(5);
    cm.accumulate(p, t);
    std::map<std::pair<int, int>, std::uint64_t> counts;
    for (std::size_t i = 0; i < 64; ++i) ++counts[{t.classes()[i], p.classes()[i]}];
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) EXPECT_EQ(cm.at(a, b), (counts[{a, b}]));
    }
    EXPECT_EQ(cm.total(), 64u);
  }
}

TEST(Miou, PerfectAndTwoClassExamples) {
  const LabelMap t = testing::random_labels(6, 6, 4, 1);
  ConfusionMatrix cm(4);
  cm.accumulate(t, t);
  EXPECT_EQ(*miou_percent(cm), 100.0);

  LabelMap truth(1, 10, 0);
  for (std::size_t x = 5; x < 10; ++x) truth.at(0, x) = 1;
  ConfusionMatrix two(2);
  two.accumulate(LabelMap(1, 10, 0), truth);
  EXPECT_EQ(*two.iou(0), 0.5);
  EXPECT_EQ(*two.iou(1), 0.0);
  EXPECT_EQ(*miou_percent(two), 25.0);
  EXPECT_FALSE(miou(ConfusionMatrix(3)).has_value());
}

TEST(Miou, EqualsSetOracleExactly) {
  for (std::uint64_t s = 0; s < 150; ++s) {
    CounterRng rng(s);
    const int k = 2 + static_cast<int>(rng.below(5));
    const std::size_t h = 1 + rng.below(7), w = 1 + rng.below(7);
    const LabelMap p = testing::random_labels(h, w, k, 5000 + s), t = testing::random_labels(h, w, k, 9000 + s);
    ConfusionMatrix cm(k);
    cm.accumulate(p, t);
    EXPECT_EQ(miou(cm), set_oracle_miou(p, t, k));
  }
}

TEST(ConfusionMatrix, MergeIsAdditiveAndOrderIndependent) {
  const LabelMap p1 = testing::random_labels(4, 4, 3, 1), t1 = testing::random_labels(4, 4, 3, 2);
  const LabelMap p2 = testing::random_labels(4, 4, 3, 3), t2 = testing::random_labels(4, 4, 3, 4);
  ConfusionMatrix a(3), b(3), ab(3), ba(3);
  a.accumulate(p1, t1);
  b.accumulate(p2, t2);
  ab.accumulate(p1, t1);
  ab.accumulate(p2, t2);
  ba.accumulate(p2, t2);
  ba.accumulate(p1, t1);
  ConfusionMatrix merged = a;
  merged += b;
  EXPECT_EQ(merged, ab);
  EXPECT_EQ(ab, ba);
  // Concatenating the two maps side by side gives the same matrix.
  LabelMap pc(4, 8), tc(4, 8);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      pc.at(y, x) = p1.at(y, x);
      pc.at(y, x + 4) = p2.at(y, x);
      tc.at(y, x) = t1.at(y, x);
      tc.at(y, x + 4) = t2.at(y, x);
    }
  }
  ConfusionMatrix concat(3);
  concat.accumulate(pc, tc);
  EXPECT_EQ(concat, merged);
}

TEST(Msc, SingleScaleWithoutFlipEqualsPlainPredict) {
  const SegNet net = make_segnet(HeadKind::SCrIBE, 4, 3);
  const Tensor img = testing::random_tensor({20, 18, 3}, 8, 0.0, 1.0);
  MscOptions opt;
  opt.scales = {1.0};
  opt.flip = false;
  EXPECT_EQ(msc_predict(net, img, opt), predict(forward(net, img)));
  opt.average = MscAverage::Logits;
  EXPECT_EQ(msc_predict(net, img, opt), predict(forward(net, img)));
}

TEST(Msc, ConstantLogitNetworkMatchesPlainPredict) {
  for (auto head : kAllHeads) {
    SegNet net = make_segnet(head, 4, 1);
    for (double& v : net.layers.back().kernel.data()) v = 0.0;
    for (std::size_t c = 0; c < net.layers.back().bias.size(); ++c) net.layers.back().bias[c] = 0.3 * static_cast<double>(c) - 0.5;
    const Tensor img = testing::random_tensor({16, 16, 3}, 2, 0.0, 1.0);
    EXPECT_EQ(msc_predict(net, img, MscOptions{}), predict(forward(net, img))) << head_name(head);
  }
}

struct BenchFixture : ::testing::Test {
  std::vector<Sample> data;
  SegNet a = make_segnet(HeadKind::SoftmaxBaseline, 4, 1);
  SegNet b = make_segnet(HeadKind::IBE, 4, 2);
  SegNet c = make_segnet(HeadKind::SCrIBE, 4, 3);

  void SetUp() override {
    SyntheticSceneSpec spec;
    spec.image_size = 16;
    spec.min_radius = 4;
    spec.max_radius = 6;
    data = generate(spec, 2);
  }
};

TEST_F(BenchFixture, FullSuiteHasExpectedCellCount) {
  const std::vector<BenchmarkModel> models{{"baseline", &a}, {"ibe", &b}, {"scribe", &c}};
  const auto suite = corruption_suite({1, 2, 3, 4, 5}, 1);
  const BenchmarkReport r = run_benchmark(models, data, suite);
  std::size_t corrupted = 0, clean = 0;
  for (const auto& cell : r.cells) (cell.kind ? corrupted : clean) += 1;
  EXPECT_EQ(corrupted, 225u);
  EXPECT_EQ(clean, 3u);
  EXPECT_EQ(r.severities, (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(r.kinds.size(), 15u);
}

TEST_F(BenchFixture, CorruptsEachImageOnceAndSharesItAcrossModels) {
  std::mutex mu;
  std::map<std::pair<std::size_t, std::uint64_t>, int> seen;
  BenchmarkOptions opt;
  opt.workers = 3;
  opt.on_corrupt = [&](std::size_t i, const CorruptionSpec& s) {
    std::lock_guard<std::mutex> lock(mu);
    ++seen[{i, s.seed}];
  };
  const std::vector<BenchmarkModel> models{{"a", &a}, {"b", &b}, {"c", &c}};
  const auto suite = corruption_suite({2, 4}, 5);
  run_benchmark(models, data, suite, opt);
  EXPECT_EQ(seen.size(), data.size() * suite.size());
  for (const auto& [key, count] : seen) EXPECT_EQ(count, 1);
}

TEST_F(BenchFixture, IdenticalModelsGiveIdenticalColumns) {
  const std::vector<BenchmarkModel> models{{"x", &a}, {"y", &a}};
  const BenchmarkReport r = run_benchmark(models, data, corruption_suite({1, 3}, 2));
  for (int sev : r.severities) {
    for (auto k : r.kinds) EXPECT_EQ(r.cell("x", k, sev, false), r.cell("y", k, sev, false));
  }
  EXPECT_EQ(r.clean("x", false), r.clean("y", false));
}

TEST_F(BenchFixture, RerunAndWorkerCountGiveIdenticalReport) {
  const std::vector<BenchmarkModel> models{{"a", &a}, {"c", &c}};
  const auto suite = corruption_suite({1, 5}, 9);
  BenchmarkOptions one, many;
  one.msc = many.msc = true;
  many.workers = 4;
  const BenchmarkReport r1 = run_benchmark(models, data, suite, one);
  EXPECT_EQ(r1, run_benchmark(models, data, suite, one));
  EXPECT_EQ(r1, run_benchmark(models, data, suite, many));
}

TEST_F(BenchFixture, MissingCheckpointIsUsageErrorNamingIt) {
  const std::vector<BenchmarkModel> models{{"a", &a}, {"ghost", nullptr}};
  try {
    run_benchmark(models, data, corruption_suite({1}, 0));
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST_F(BenchFixture, AggregatesAreMeansOfCells) {
  const std::vector<BenchmarkModel> models{{"a", &a}};
  const BenchmarkReport r = run_benchmark(models, data, corruption_suite({1, 2}, 3));
  double total = 0.0;
  int n = 0;
  for (const auto& cell : r.cells) {
    if (cell.kind && cell.severity == 2 && group_of(*cell.kind) == CorruptionGroup::Noise) {
      total += cell.miou;
      ++n;
    }
  }
  ASSERT_EQ(n, 3);
  double group = 0.0;
  for (auto k : r.kinds) {
    if (group_of(k) == CorruptionGroup::Noise) group += *r.cell("a", k, 1, false) + *r.cell("a", k, 2, false);
  }
  EXPECT_NEAR(*r.group_mean("a", CorruptionGroup::Noise, false), group / 6.0, 1e-12);
  EXPECT_EQ(*r.severity_mean("a", 0, false), *r.clean("a", false));
}

}  // namespace
}  // namespace segrobust
