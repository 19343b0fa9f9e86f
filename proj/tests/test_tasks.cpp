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

#include <atomic>

#include "qrc/tasks.hpp"

namespace qrc {
namespace {

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_GE(default_workers(), 1u);
}

TEST(ParallelFor, RethrowsLowestIndexError) {
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL() << "no exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
}

TEST(TrajectoryId, ClassesDoNotCollide) {
  EXPECT_EQ(trajectory_id(1, 5), 5u);
  EXPECT_NE(trajectory_id(2, 5), trajectory_id(1, 5));
  EXPECT_EQ(trajectory_id(3, 0), 2ull << 32);
}

TEST(Spearman, RanksWithTies) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3}, {1, 1, 2}), std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_THROW(spearman({1}, {1}), std::invalid_argument);
}

TEST(KerrOracle, DriveForTargetOccupation) {
  EXPECT_NEAR(drive_for_n(0.3, 0.02, 1.0) / 1.0 * std::sqrt(0.02), 0.3, 1e-15);
  const ChainSpec c = single_kerr_chain(-1.0, 0.02, 2.0, 1.0);
  EXPECT_EQ(c.channels.size(), 1u);
  EXPECT_TRUE(c.has_kerr());
}

TEST(KerrOracle, SmallKerrAgreesClosely) {
  const KerrOracleReport r = kerr_steady_oracle(-1.0, {0.005}, {0.1, 0.3}, 1.0, 2);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_LT(r.max_err(0.005), 2e-2);
  EXPECT_NE(r.to_json().find("qrc-oracle-steady"), std::string::npos);
}

TEST(FinalQuadratures, MatchesRecordFilter) {
  TaskIISpec s;
  const Model model(build_task2_chain(s, 1));
  const IntegratorConfig cfg{1e-2, 6.0, 3, 100, "euler_maruyama"};
  const std::vector<double> q = final_quadratures(model, cfg, 3.0, 11);
  const TrajectoryResult r = simulate_trajectory(model, cfg, 11, vacuum(model.n_modes()));
  const QuadratureSeries f = boxcar_filter(r.record, 3.0);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q[0], f.ix[0].back(), 1e-10);
  EXPECT_NEAR(q[1], f.ip[0].back(), 1e-10);
}

Task1Config tiny_task1() {
  Task1Config c;
  c.integrator = IntegratorConfig{1e-3, 1.0, 1, 100, "euler_maruyama"};
  c.q_train = 3;
  c.q_test = 3;
  c.train.max_iter = 200;
  return c;
}

TEST(Task1, DeterministicAcrossWorkerCounts) {
  Task1Config a = tiny_task1(), b = tiny_task1();
  a.workers = 1;
  b.workers = 3;
  const Task1Result ra = run_task1(a), rb = run_task1(b);
  ASSERT_EQ(ra.test_accuracy.size(), 10u);
  EXPECT_EQ(ra.test_accuracy, rb.test_accuracy);
  EXPECT_EQ(ra.train_set.X, rb.train_set.X);
  EXPECT_EQ(ra.layer.W, rb.layer.W);
  EXPECT_EQ(ra.train_set.size(), 4u * 3u * 10u);
  EXPECT_EQ(ra.failed_trajectories, 0);
  EXPECT_EQ(ra.layer.b.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Task1, ValidationErrors) {
  Task1Config c = tiny_task1();
  c.q_train = 0;
  EXPECT_THROW(run_task1(c), std::invalid_argument);
  c = tiny_task1();
  c.integrator.dt = -1.0;
  EXPECT_THROW(run_task1(c), std::invalid_argument);
}

Task2Config tiny_task2() {
  Task2Config c;
  c.t0 = 2.0;
  c.t_final = 5.0;
  c.q_train = 4;
  c.q_test = 4;
  c.ns_grid = {1, 2};
  c.train.max_iter = 200;
  return c;
}

TEST(Task2, DisjointPoolAndDeterminism) {
  Task2Config a = tiny_task2(), b = tiny_task2();
  b.workers = 2;
  const Task2Result ra = run_task2(a), rb = run_task2(b);
  EXPECT_EQ(ra.pool_per_class, 16u);
  ASSERT_EQ(ra.test_accuracy.size(), 2u);
  EXPECT_EQ(ra.test_accuracy, rb.test_accuracy);
  EXPECT_EQ(ra.pool, rb.pool);
  ASSERT_EQ(ra.train_sets.size(), 2u);
  EXPECT_EQ(ra.train_sets[1].size(), 8u);
  EXPECT_EQ(ra.test_sets[1].size(), 8u);
}

TEST(Task2, ValidationErrors) {
  Task2Config c = tiny_task2();
  c.ns_grid = {};
  EXPECT_THROW(run_task2(c), std::invalid_argument);
  c = tiny_task2();
  c.t0 = 10.0;
  EXPECT_THROW(run_task2(c), std::invalid_argument);
  c = tiny_task2();
  c.q_test = 0;
  EXPECT_THROW(run_task2(c), std::invalid_argument);
}

TEST(Task2, CoarseStepMatchesFineStepUnconditional) {
  const TaskIISpec spec;
  for (int sigma : {1, 2}) {
    const ChainSpec chain = build_task2_chain(spec, sigma);
    const auto coarse = evolve_unconditional(chain, {1e-2, 60.0, 1, 6000, "euler_maruyama"}, vacuum(chain.network.size()));
    const auto fine = evolve_unconditional(chain, {1e-3, 60.0, 1, 60000, "euler_maruyama"}, vacuum(chain.network.size()));
    const CumulantState& a = coarse.back();
    const CumulantState& b = fine.back();
    EXPECT_LT((a.mu - b.mu).norm() / b.mu.norm(), 2e-2) << "class " << sigma;
    EXPECT_LT((a.c_bdb - b.c_bdb).norm() / b.c_bdb.norm(), 5e-2) << "class " << sigma;
  }
}

}  // namespace
}  // namespace qrc
