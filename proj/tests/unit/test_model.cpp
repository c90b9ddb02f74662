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

#include <cmath>
#include <filesystem>

#include "segrobust/dataset.hpp"
#include "segrobust/error.hpp"
#include "segrobust/model.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/trainer.hpp"
#include "test_util.hpp"

namespace segrobust {
namespace {

TEST(SegNet, LayerPlanAndHeadIsomorphism) {
  const SegNet base = make_segnet(HeadKind::SoftmaxBaseline, 4, 1);
  const SegNet sig = make_segnet(HeadKind::SigmoidOnly, 4, 1);
  const SegNet ibe = make_segnet(HeadKind::IBE, 4, 1);
  const SegNet scr = make_segnet(HeadKind::SCrIBE, 4, 1);
  ASSERT_EQ(base.layers.size(), 4u);
  EXPECT_EQ(base.layers[0].kernel.shape(), (std::vector<std::size_t>{3, 3, 3, 16}));
  EXPECT_EQ(base.layers[3].kernel.shape(), (std::vector<std::size_t>{3, 3, 32, 4}));
  EXPECT_EQ(base.parameter_count(), sig.parameter_count());
  EXPECT_EQ(ibe.parameter_count(), scr.parameter_count());
  EXPECT_EQ(base.parameter_count() - ibe.parameter_count(), 3u * 3u * 32u + 1u);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(base.layers[l], ibe.layers[l]);  // same body init
}

TEST(Forward, ZeroFinalLayerGivesZeroLogitsAndIsDeterministic) {
  SegNet net = make_segnet(HeadKind::IBE, 4, 3);
  const Tensor img = testing::random_tensor({12, 10, 3}, 5, 0.0, 1.0);
  EXPECT_EQ(forward(net, img).logits, forward(net, img).logits);
  for (double& v : net.layers.back().kernel.data()) v = 0.0;
  const LogitMap out = forward(net, img);
  EXPECT_EQ(out.logits.shape(), (std::vector<std::size_t>{12, 10, 3}));
  for (double v : out.logits.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(forward(net, Tensor({4, 4, 2})), UsageError);
}

TEST(Backward, MatchesFiniteDifferencesForEveryHead) {
  for (auto head : kAllHeads) {
    for (std::uint64_t inst = 0; inst < 5; ++inst) {
      SegNet net = make_segnet(head, 4, 40 + inst);
      // Shrink the body so the check stays fast while covering every layer type.
      const std::vector<Tensor> images{testing::random_tensor({16, 16, 3}, 10 + inst, 0.0, 1.0),
                                       testing::random_tensor({16, 16, 3}, 20 + inst, 0.0, 1.0)};
      const std::vector<LabelMap> labels{testing::random_labels(16, 16, 4, 30 + inst),
                                         testing::random_labels(16, 16, 4, 31 + inst)};
      const BackwardResult res = backward(net, images, labels);
      const std::vector<double> analytic = flatten(res.grads);
      std::vector<double> params = flatten(net.layers);
      // Spot-check a deterministic subset of coordinates in every layer.
      std::vector<double> fd_vals, an_vals;
      CounterRng pick(derive_key({inst, static_cast<std::uint64_t>(head)}));
      for (int t = 0; t < 60; ++t) {
        const std::size_t i = pick.below(params.size());
        const double eps = 1e-5, orig = params[i];
        SegNet probe = net;
        params[i] = orig + eps;
        unflatten(params, probe.layers);
        const double up = backward(probe, images, labels).loss;
        params[i] = orig - eps;
        unflatten(params, probe.layers);
        const double down = backward(probe, images, labels).loss;
        params[i] = orig;
        fd_vals.push_back((up - down) / (2 * eps));
        an_vals.push_back(analytic[i]);
      }
      EXPECT_LE(relative_error(an_vals, fd_vals), 1e-4) << head_name(head) << " instance " << inst;
    }
  }
}

TEST(Backward, DuplicatedBatchKeepsMeanGradient) {
  const SegNet net = make_segnet(HeadKind::SoftmaxBaseline, 4, 2);
  const Tensor img = testing::random_tensor({8, 8, 3}, 1, 0.0, 1.0);
  const LabelMap lab = testing::random_labels(8, 8, 4, 2);
  const auto one = backward(net, std::vector<Tensor>{img}, std::vector<LabelMap>{lab});
  const auto two = backward(net, std::vector<Tensor>{img, img}, std::vector<LabelMap>{lab, lab});
  EXPECT_LE(relative_error(flatten(one.grads), flatten(two.grads)), 1e-15);
  EXPECT_NEAR(one.loss, two.loss, 1e-15);
}

TEST(Backward, ResultIndependentOfWorkerCount) {
  const SegNet net = make_segnet(HeadKind::SCrIBE, 4, 2);
  std::vector<Tensor> imgs;
  std::vector<LabelMap> labs;
  for (std::uint64_t i = 0; i < 5; ++i) {
    imgs.push_back(testing::random_tensor({8, 8, 3}, i, 0.0, 1.0));
    labs.push_back(testing::random_labels(8, 8, 4, 100 + i));
  }
  const auto a = backward(net, imgs, labs, 1);
  const auto b = backward(net, imgs, labs, 4);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grads, b.grads);
}

TEST(PolyLr, SpecExamples) {
  TrainConfig cfg;
  cfg.total_iters = 1000;
  EXPECT_EQ(poly_lr(0, cfg), cfg.base_lr);
  EXPECT_EQ(poly_lr(1000, cfg), 0.0);
  EXPECT_NEAR(poly_lr(500, cfg), cfg.base_lr * 0.535886731268146, 1e-15);
  EXPECT_THROW(poly_lr(1001, cfg), UsageError);
  EXPECT_THROW(poly_lr(-1, cfg), UsageError);
  for (int i = 1; i <= 1000; ++i) EXPECT_LT(poly_lr(i, cfg), poly_lr(i - 1, cfg));
}

TEST(Augment, IdentityAtUnitScaleAndDeterministic) {
  TrainConfig cfg;
  cfg.crop_size = 16;
  cfg.scale_lo = cfg.scale_hi = 1.0;
  const Tensor img = testing::random_tensor({16, 16, 3}, 4, 0.0, 1.0);
  const LabelMap lab = testing::random_labels(16, 16, 4, 5);
  CounterRng rng(9);
  const auto [a_img, a_lab] = augment(img, lab, cfg, rng);
  EXPECT_EQ(a_img, img);
  EXPECT_EQ(a_lab, lab);

  cfg.scale_lo = 0.75;
  cfg.scale_hi = 1.25;
  const Tensor big = testing::random_tensor({24, 20, 3}, 6, 0.0, 1.0);
  LabelMap big_lab(24, 20, 0);
  for (std::size_t y = 4; y < 12; ++y) {
    for (std::size_t x = 3; x < 9; ++x) big_lab.at(y, x) = 2;
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    CounterRng r1(s), r2(s);
    const auto p1 = augment(big, big_lab, cfg, r1);
    const auto p2 = augment(big, big_lab, cfg, r2);
    EXPECT_EQ(p1.first, p2.first);
    EXPECT_EQ(p1.second, p2.second);
    EXPECT_EQ(p1.first.dim(0), 16u);
    for (int c : p1.second.classes()) EXPECT_TRUE(c == 0 || c == 2);
  }
}

std::vector<Sample> tiny_dataset() {
  SyntheticSceneSpec spec;
  spec.image_size = 24;
  spec.min_radius = 4;
  spec.max_radius = 7;
  return generate(spec, 6);
}

TEST(Train, ZeroItersReturnsInitialization) {
  TrainConfig cfg;
  cfg.total_iters = 0;
  cfg.crop_size = 16;
  cfg.head = HeadKind::IBE;
  const Checkpoint ck = train(cfg, tiny_dataset());
  EXPECT_EQ(ck.net, make_segnet(HeadKind::IBE, 4, cfg.seed));
  EXPECT_EQ(ck.iteration, 0);
  EXPECT_TRUE(ck.loss_history.empty());
}

TEST(Train, DeterministicAcrossRunsAndWorkers) {
  TrainConfig cfg;
  cfg.total_iters = 4;
  cfg.batch_size = 3;
  cfg.crop_size = 16;
  cfg.head = HeadKind::SCrIBE;
  const auto data = tiny_dataset();
  const Checkpoint a = train(cfg, data, {1, {}});
  const Checkpoint b = train(cfg, data, {3, {}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.loss_history.size(), 4u);
  EXPECT_THROW(train(cfg, std::vector<Sample>{}), UsageError);
}

TEST(Checkpoint, SerializationRoundTripIsBitExact) {
  TrainConfig cfg;
  cfg.total_iters = 2;
  cfg.crop_size = 16;
  cfg.head = HeadKind::SigmoidOnly;
  const Checkpoint ck = train(cfg, tiny_dataset());
  EXPECT_EQ(deserialize_checkpoint(serialize_checkpoint(ck)), ck);
  const auto path = std::filesystem::temp_directory_path() / "segrobust_ckpt_test.ckpt";
  save_checkpoint(path, ck);
  EXPECT_EQ(load_checkpoint(path), ck);
  std::filesystem::remove(path);
  EXPECT_THROW(deserialize_checkpoint("segrobust-checkpoint 1\nhead nope\n"), DataError);
  EXPECT_THROW(deserialize_checkpoint("garbage"), DataError);
}

}  // namespace
}  // namespace segrobust
