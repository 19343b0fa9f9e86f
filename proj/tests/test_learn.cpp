// Copyright 2026 The qrcsim Authors
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

#include <random>
#include <set>
#include <sstream>

#include "properties.hpp"
#include "qrc/learn.hpp"

namespace qrc {
namespace {

HeterodyneRecord constant_record(double jx, double jp, std::size_t n, double dt_block) {
  HeterodyneRecord r;
  r.jx.assign(1, {});
  r.jp.assign(1, {});
  for (std::size_t i = 0; i < n; ++i) {
    r.times.push_back(dt_block * static_cast<double>(i + 1));
    r.jx[0].push_back(jx);
    r.jp[0].push_back(jp);
  }
  return r;
}

TEST(Boxcar, ConstantCurrentIsRecovered) {
  const QuadratureSeries q = boxcar_filter(constant_record(1.5, -0.5, 20, 0.1));
  ASSERT_EQ(q.size(), 20u);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(q.ix[0][i], 1.5, 1e-14);
    EXPECT_NEAR(q.ip[0][i], -0.5, 1e-14);
  }
  EXPECT_EQ(q.features(3).size(), 2);
}

TEST(Boxcar, WindowStartsAtT0) {
  HeterodyneRecord r = constant_record(0.0, 0.0, 10, 1.0);
  for (std::size_t i = 5; i < 10; ++i) r.jx[0][i] = 2.0;  // blocks (5, 6], ..., (9, 10]
  const QuadratureSeries q = boxcar_filter(r, 5.0);
  ASSERT_EQ(q.size(), 5u);
  EXPECT_NEAR(q.times.front(), 6.0, 1e-15);
  for (double v : q.ix[0]) EXPECT_NEAR(v, 2.0, 1e-14);
  EXPECT_THROW(boxcar_filter(HeterodyneRecord{}), std::invalid_argument);
}

TEST(Boxcar, EnsembleAverage) {
  const QuadratureSeries a = boxcar_filter(constant_record(1.0, 0.0, 4, 0.5));
  const QuadratureSeries b = boxcar_filter(constant_record(3.0, 2.0, 4, 0.5));
  const QuadratureSeries m = ensemble_average({a, b});
  EXPECT_NEAR(m.ix[0][2], 2.0, 1e-15);
  EXPECT_NEAR(m.ip[0][2], 1.0, 1e-15);
}

TEST(Pools, DisjointPartition) {
  const auto g = partition_pool(23, 5);
  ASSERT_EQ(g.size(), 4u);
  std::set<std::size_t> seen;
  for (const auto& grp : g) {
    EXPECT_EQ(grp.size(), 5u);
    for (std::size_t i : grp) EXPECT_TRUE(seen.insert(i).second);
  }
  EXPECT_THROW(partition_pool(10, 0), std::invalid_argument);
  const auto b1 = bootstrap_pool(10, 7, 3, 4), b2 = bootstrap_pool(10, 7, 3, 4);
  EXPECT_EQ(b1, b2);
  for (const auto& grp : b1)
    for (std::size_t i : grp) EXPECT_LT(i, 10u);
}

TEST(Projection, RotatesQuadraturePairs) {
  RVec x(4);
  x << 1.0, 2.0, -1.0, 0.5;
  const RVec y = project_phi(x, {0.0, M_PI / 2.0});
  EXPECT_NEAR(y(0), 1.0, 1e-15);
  EXPECT_NEAR(y(1), 0.5, 1e-15);
}

TEST(Softmax, ShiftInvarianceAndStability) {
  EXPECT_TRUE(properties::softmax_shift_invariant(3));
  RVec z(3);
  z << 1000.0, 1001.0, 999.0;
  const RVec s = softmax(z);
  EXPECT_TRUE(s.allFinite());
  EXPECT_NEAR(s.sum(), 1.0, 1e-15);
}

TEST(DecisionBoundary, PointsOnPlaneTie) {
  EXPECT_LT(properties::boundary_tie_error(5), 1e-10);
  OutputLayer l;
  l.W = RMat::Zero(2, 2);
  l.b = RVec::Zero(2);
  EXPECT_TRUE(decision_boundary(l, 1, 2).degenerate);
  EXPECT_THROW(decision_boundary(l, 1, 1), std::invalid_argument);
}

Dataset blobs(int per_class, std::uint64_t seed, double sep) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Dataset d;
  d.n_classes = 3;
  d.X.resize(2, 3 * per_class);
  const double cx[3] = {sep, -sep, 0.0}, cy[3] = {0.0, 0.0, sep};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per_class; ++i) {
      const Eigen::Index j = c * per_class + i;
      d.X(0, j) = cx[c] + 0.3 * g(rng);
      d.X(1, j) = cy[c] + 0.3 * g(rng);
      d.labels.push_back(c + 1);
      d.q.push_back(i);
      d.t.push_back(0.0);
    }
  return d;
}

TEST(Train, SeparatesBlobs) {
  const Dataset tr = blobs(60, 1, 2.0), te = blobs(60, 2, 2.0);
  const OutputLayer l = train(tr);
  EXPECT_GT(accuracy(l, te), 0.98);
  EXPECT_GT(l.train_accuracy, 0.98);
  EXPECT_LE(training_loss(l, tr), l.loss_history.front() + 1e-12);
}

TEST(Train, ZeroBiasOption) {
  TrainOptions o;
  o.fit_bias = false;
  const OutputLayer l = train(blobs(40, 3, 2.0), o);
  EXPECT_EQ(l.b.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(l.train_accuracy, 0.9);
}

TEST(Train, PhiProjectionTrains) {
  // two channels where only X carries information
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Dataset d;
  d.n_classes = 2;
  d.X.resize(4, 200);
  for (int j = 0; j < 200; ++j) {
    const int c = j % 2;
    d.X(0, j) = (c == 0 ? 1.0 : -1.0) + 0.2 * g(rng);
    d.X(1, j) = g(rng);
    d.X(2, j) = g(rng);
    d.X(3, j) = (c == 0 ? 0.8 : -0.8) + 0.2 * g(rng);
    d.labels.push_back(c + 1);
  }
  TrainOptions o;
  o.train_phi = true;
  o.phi_grid = 16;
  const OutputLayer l = train(d, o);
  ASSERT_EQ(l.phi.size(), 2u);
  EXPECT_GT(l.train_accuracy, 0.98);
}

TEST(Train, MeansBaselineBisects) {
  const Dataset d = blobs(50, 4, 2.0);
  const OutputLayer l = train_on_means_baseline(d);
  EXPECT_EQ(l.kind, "means_baseline");
  EXPECT_GT(l.train_accuracy, 0.98);
}

TEST(Train, RejectsBadData) {
  Dataset d = blobs(5, 1, 1.0);
  d.labels[0] = 7;
  EXPECT_THROW(train(d), std::invalid_argument);
}

TEST(Metrics, FirstMaximumAndThreshold) {
  // ties within the tolerance resolve to the earliest time
  const ClassificationMetrics m = metrics({0.2, 0.995 - 1e-12, 0.5, 0.995, 0.9});
  EXPECT_NEAR(m.c_max, 0.995, 1e-15);
  EXPECT_EQ(m.argfirst_max, 1);
  EXPECT_EQ(m.index_at_threshold, 1);
  const ClassificationMetrics low = metrics({0.3, 0.6, 0.6});
  EXPECT_EQ(low.argfirst_max, 1);
  EXPECT_EQ(low.index_at_threshold, -1);
}

TEST(Persistence, DatasetCsvRoundTrip) {
  const Dataset d = blobs(4, 8, 1.0);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const Dataset r = read_dataset_csv(ss);
  EXPECT_EQ(r.n_classes, 3);
  EXPECT_EQ(r.labels, d.labels);
  EXPECT_EQ(r.q, d.q);
  EXPECT_EQ(r.X, d.X);
  std::stringstream bad("t,sigma,q\n");
  EXPECT_THROW(read_dataset_csv(bad), std::runtime_error);
}

TEST(Persistence, LayerJsonRoundTrip) {
  OutputLayer l = train(blobs(20, 6, 2.0));
  l.phi = {0.1, -0.3};
  const OutputLayer r = layer_from_json(layer_to_json(l, R"({"note":"x"})"));
  EXPECT_EQ(r.W, l.W);
  EXPECT_EQ(r.b, l.b);
  EXPECT_EQ(r.phi, l.phi);
  EXPECT_EQ(r.kind, l.kind);
  EXPECT_EQ(r.iterations, l.iterations);
}

}  // namespace
}  // namespace qrc
