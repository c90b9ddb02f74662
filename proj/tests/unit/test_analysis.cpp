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

#include "segrobust/analysis.hpp"
#include "segrobust/error.hpp"
#include "segrobust/heads.hpp"
#include "test_util.hpp"

namespace segrobust {
namespace {

ResponseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  ResponseMatrix v;
  v.k = static_cast<int>(rows.front().size());
  v.rows = rows.size();
  for (const auto& r : rows) v.values.insert(v.values.end(), r.begin(), r.end());
  return v;
}

ResponseMatrix gaussian_rows(std::size_t n, int k, std::uint64_t seed) {
  ResponseMatrix v;
  v.k = k;
  v.rows = n;
  CounterRng rng(seed);
  for (std::size_t i = 0; i < n * static_cast<std::size_t>(k); ++i) v.values.push_back(rng.normal());
  return v;
}

TEST(GatherResponses, RowCountsAndFilter) {
  const SegNet net = make_segnet(HeadKind::IBE, 4, 5);
  Sample s;
  s.image = testing::random_tensor({2, 2, 3}, 1, 0.0, 1.0);
  s.label = LabelMap(2, 2);
  const std::vector<Sample> one{s};
  const ResponseMatrix all = gather_responses(net, one);
  EXPECT_EQ(all.rows, 4u);
  EXPECT_EQ(all.k, 4);
  // Rows are augmented, class-ordered responses.
  const LogitMap out = forward(net, s.image);
  const auto expect = class_ordered_response(HeadKind::IBE, out.logits.pixel(0, 0));
  for (int c = 0; c < 4; ++c) EXPECT_EQ(all.row(0)[static_cast<std::size_t>(c)], expect[static_cast<std::size_t>(c)]);
}

TEST(GatherResponses, FilteredRowCountMatchesIndependentCount) {
  const SegNet net = make_segnet(HeadKind::SoftmaxBaseline, 4, 8);
  std::vector<Sample> data;
  for (std::uint64_t i = 0; i < 3; ++i) {
    Sample s;
    s.image = testing::random_tensor({10, 9, 3}, 20 + i, 0.0, 1.0);
    data.push_back(s);
  }
  std::size_t total = 0;
  for (int c = 0; c < 4; ++c) {
    std::size_t count = 0;
    for (const auto& s : data) {
      const LabelMap pred = predict(forward(net, s.image));
      for (int p : pred.classes()) count += p == c;
    }
    const ResponseMatrix v = gather_responses(net, data, c, 2);
    EXPECT_EQ(v.rows, count) << "class " << c;
    total += v.rows;
  }
  EXPECT_EQ(total, 3u * 90u);
  EXPECT_THROW(gather_responses(net, data, 4), UsageError);
}

TEST(GatherResponses, AbsentClassGivesEmptyMatrix) {
  SegNet net = make_segnet(HeadKind::SoftmaxBaseline, 3, 1);
  for (double& v : net.layers.back().kernel.data()) v = 0.0;
  net.layers.back().bias = {5.0, 0.0, 0.0};  // always predicts class 0
  Sample s;
  s.image = testing::random_tensor({4, 4, 3}, 1, 0.0, 1.0);
  const ResponseMatrix v = gather_responses(net, std::vector<Sample>{s}, 2);
  EXPECT_TRUE(v.empty());
}

TEST(Autocorrelation, IndependentColumnsAreNearlyOrthogonal) {
  const Autocorrelation r = autocorrelation(gaussian_rows(10000, 5, 3));
  for (int a = 0; a < 5; ++a) {
    EXPECT_EQ(r.at(a, a), 1.0);
    for (int b = 0; b < 5; ++b) {
      EXPECT_EQ(r.at(a, b), r.at(b, a));
      if (a != b) EXPECT_LE(std::abs(r.at(a, b)), 0.05);
    }
  }
}

TEST(Autocorrelation, IdenticalColumnsAndRepeatedRow) {
  const Autocorrelation same = autocorrelation(from_rows({{1, 1, 0.5}, {2, 2, -1}, {-3, -3, 2}}));
  EXPECT_NEAR(same.at(0, 1), 1.0, 1e-15);
  const std::vector<double> v{2.0, -1.0, 0.5, -4.0};
  const Autocorrelation rep = autocorrelation(from_rows({v, v, v}));
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double sign = (v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)]) > 0 ? 1.0 : -1.0;
      EXPECT_NEAR(rep.at(a, b), sign, 1e-15);
    }
  }
}

TEST(Autocorrelation, ZeroColumnIsFlaggedAndNeedsTwoRows) {
  const Autocorrelation r = autocorrelation(from_rows({{1, 0, 2}, {3, 0, -1}}));
  EXPECT_TRUE(r.zero_columns[1]);
  EXPECT_FALSE(r.zero_columns[0]);
  EXPECT_EQ(r.at(1, 1), 0.0);
  EXPECT_EQ(r.at(0, 1), 0.0);
  EXPECT_THROW(autocorrelation(from_rows({{1, 2}})), UsageError);
}

TEST(Autocorrelation, CenteredOptionRemovesCommonOffset) {
  ResponseMatrix v = gaussian_rows(5000, 3, 9);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += 10.0;
  EXPECT_GT(autocorrelation(v).at(0, 1), 0.9);
  EXPECT_LT(std::abs(autocorrelation(v, true).at(0, 1)), 0.05);
}

TEST(SymmetricEigenvalues, MatchKnownSpectrum) {
  // Q diag(5, 2, 0.5) Q^T for a rotation Q.
  const double c = std::cos(0.3), s = std::sin(0.3);
  const std::vector<double> q{c, -s, 0, s, c, 0, 0, 0, 1};
  const std::vector<double> d{5, 2, 0.5};
  std::vector<double> m(9, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int t = 0; t < 3; ++t) m[static_cast<std::size_t>(i * 3 + j)] += q[static_cast<std::size_t>(i * 3 + t)] * d[static_cast<std::size_t>(t)] * q[static_cast<std::size_t>(j * 3 + t)];
    }
  }
  const auto e = symmetric_eigenvalues(m, 3);
  EXPECT_NEAR(e[0], 5.0, 1e-12);
  EXPECT_NEAR(e[1], 2.0, 1e-12);
  EXPECT_NEAR(e[2], 0.5, 1e-12);
}

TEST(ExplainedVariance, IsotropicRowsGiveLinearCurve) {
  const EVCurve curve = explained_variance(gaussian_rows(40000, 6, 4));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(curve.accumulated[i], static_cast<double>(i + 1) / 6.0, 0.05);
  EXPECT_EQ(curve.accumulated.back(), 1.0);
}

TEST(ExplainedVariance, RankOneAndTraceIdentity) {
  std::vector<std::vector<double>> rows;
  CounterRng rng(2);
  for (int i = 0; i < 40; ++i) {
    const double t = rng.normal();
    rows.push_back({t, -2.0 * t, 0.5 * t, 3.0 * t});
  }
  const EVCurve r1 = explained_variance(from_rows(rows));
  EXPECT_NEAR(r1.accumulated[0], 1.0, 1e-9);
  EXPECT_EQ(effective_dim(r1, 0.95), 1);

  const ResponseMatrix v = gaussian_rows(300, 5, 6);
  const EVCurve curve = explained_variance(v);
  const auto cov = covariance(v);
  double trace = 0.0, sum = 0.0;
  for (int a = 0; a < 5; ++a) trace += cov[static_cast<std::size_t>(a * 5 + a)];
  for (double e : curve.eigenvalues) {
    EXPECT_GE(e, 0.0);
    sum += e;
  }
  EXPECT_NEAR(sum, trace, 1e-9);
  for (std::size_t i = 1; i < curve.accumulated.size(); ++i) EXPECT_GE(curve.accumulated[i], curve.accumulated[i - 1]);
  EXPECT_THROW(explained_variance(gaussian_rows(5, 5, 1)), UsageError);
}

TEST(EffectiveDim, IsotropicTwentyOneAndMonotoneInThreshold) {
  EVCurve linear;
  for (int i = 1; i <= 21; ++i) linear.accumulated.push_back(static_cast<double>(i) / 21.0);
  EXPECT_EQ(effective_dim(linear, 0.95), 20);
  int prev = 0;
  for (double t = 0.01; t < 1.0; t += 0.01) {
    const int d = effective_dim(linear, t);
    EXPECT_GE(d, prev);
    prev = d;
  }
  EXPECT_THROW(effective_dim(linear, 1.0), UsageError);
  EXPECT_THROW(effective_dim(linear, 0.0), UsageError);
}

TEST(OffDiagonalScore, MeanAbsoluteOfRow) {
  Autocorrelation r;
  r.k = 3;
  r.values = {1, -0.4, 0.2, -0.4, 1, 0.0, 0.2, 0.0, 1};
  EXPECT_NEAR(off_diagonal_score(r, 0), 0.3, 1e-15);
  EXPECT_NEAR(off_diagonal_score(r, 1), 0.2, 1e-15);
}

}  // namespace
}  // namespace segrobust
