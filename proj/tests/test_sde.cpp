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

#include <sstream>

#include "properties.hpp"
#include "qrc/sde.hpp"

namespace qrc {
namespace {

TEST(NoiseStream, CounterBasedAndReproducible) {
  NoiseStream a(5, 3), b(5, 3), c(5, 4), d(6, 3);
  EXPECT_EQ(a.normal(100, 0, 1), b.normal(100, 0, 1));
  EXPECT_NE(a.normal(100, 0, 1), c.normal(100, 0, 1));
  EXPECT_NE(a.normal(100, 0, 1), d.normal(100, 0, 1));
  EXPECT_NE(a.normal(100, 0, 0), a.normal(100, 0, 1));
  EXPECT_NE(a.normal(100, 0, 0), a.normal(101, 0, 0));
}

TEST(NoiseStream, IncrementStatistics) {
  NoiseStream ns(42, 0);
  const double dt = 1e-2;
  double m = 0.0, v = 0.0, cross = 0.0;
  const int n = 200000;
  double dW[2];
  for (int s = 0; s < n; ++s) {
    ns.increments(static_cast<std::uint64_t>(s), 1, dt, dW);
    m += dW[0];
    v += dW[0] * dW[0];
    cross += dW[0] * dW[1];
  }
  EXPECT_NEAR(m / n, 0.0, 5.0 * std::sqrt(dt / n));
  EXPECT_NEAR(v / n / dt, 1.0, 0.02);
  EXPECT_NEAR(cross / n / dt, 0.0, 0.02);
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = IntegratorConfig{};
  c.scheme = "milstein";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = IntegratorConfig{};
  c.store_stride = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ((IntegratorConfig{1e-3, 10.0}).n_steps(), 10000u);
}

TEST(Stepper, ConditionalCoherentFixedPoint) {
  EXPECT_LT(properties::conditional_coherent_drift(20000), 1e-12);
}

TEST(Stepper, UnconditionalLinearMatchesClosedForm) {
  // H = -delta b^dag b + eta b^dag + h.c.: d<b>/dt = (i delta - gamma/2)<b> - i eta
  ChainSpec c;
  c.network = ModeNetwork::anonymous(1);
  c.blocks = {Detuning{0, 0.8}, CoherentDrive{0, cplx(0.5, 0.0)}};
  c.add_loss(0, 1.0, false);
  const CumulantState s = steady_state(c, 1e-12);
  const cplx expect = cplx(0.0, 0.5) / cplx(-0.5, 0.8);
  EXPECT_NEAR(std::abs(s.mu(0) - expect), 0.0, 1e-9);
  EXPECT_NEAR(s.c_bdb.norm() + s.c_bb.norm(), 0.0, 1e-12);
}

TEST(Stepper, SqueezedSteadyStateMatchesLyapunov) {
  // DPA below threshold, on resonance: <b^dag b> = 2G^2 / (gamma^2 - 4G^2) with H = i G (e^{i phi} b^dag2 - h.c.)/2
  ChainSpec c;
  c.network = ModeNetwork::anonymous(1);
  c.blocks = {DegenerateParametric{0, 0.25, 0.0}};
  c.add_loss(0, 1.0, false);
  const CumulantState s = steady_state(c, 1e-13);
  FockModel fm(c, {30});
  const CumulantState f = fm.cumulants(fm.steady_state_dense());
  EXPECT_NEAR(s.c_bdb(0, 0).real(), f.c_bdb(0, 0).real(), 1e-6);
  EXPECT_NEAR(std::abs(s.c_bb(0, 0) - f.c_bb(0, 0)), 0.0, 1e-6);
}

TEST(Trajectory, ByteIdenticalReruns) {
  const ChainSpec chain = single_kerr_chain(-1.0, 0.05, 1.5, 1.0);
  const IntegratorConfig cfg{1e-3, 2.0, 9, 50, "euler_maruyama"};
  EXPECT_EQ(properties::steo_bytes(chain, cfg, 3), properties::steo_bytes(chain, cfg, 3));
  EXPECT_NE(properties::steo_bytes(chain, cfg, 3), properties::steo_bytes(chain, cfg, 4));
}

TEST(Trajectory, SteoRoundTrip) {
  const ChainSpec chain = single_kerr_chain(-1.0, 0.05, 1.5, 1.0);
  const IntegratorConfig cfg{1e-3, 1.0, 2, 100, "euler_maruyama"};
  const TrajectoryResult r = simulate_trajectory(chain, cfg, 7);
  ASSERT_EQ(r.states.size(), 10u);
  ASSERT_EQ(r.record.size(), 10u);
  std::stringstream ss;
  write_steo(ss, r);
  const TrajectoryResult back = read_steo(ss);
  EXPECT_EQ(back.record.seed, 2u);
  EXPECT_EQ(back.record.trajectory, 7u);
  EXPECT_EQ(back.record.times, r.record.times);
  EXPECT_EQ(back.record.jx, r.record.jx);
  EXPECT_EQ(back.record.jp, r.record.jp);
  for (std::size_t i = 0; i < r.states.size(); ++i) EXPECT_EQ(serialize(back.states[i]), serialize(r.states[i]));
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_steo(bad), std::runtime_error);
}

TEST(Trajectory, CsvHeader) {
  const ChainSpec chain = single_kerr_chain(-1.0, 0.05, 1.5, 1.0);
  const TrajectoryResult r = simulate_trajectory(chain, IntegratorConfig{1e-3, 0.1, 1, 50, "euler_maruyama"}, 0);
  std::ostringstream os;
  write_trajectory_csv(os, r);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "t,mu_re_0,mu_im_0,cbb_re_00,cbb_im_00,cbdb_re_00,JX_0,JP_0");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Trajectory, EnsembleMeanMatchesUnconditional) {
  const auto check = properties::ensemble_vs_unconditional(400);
  EXPECT_GT(check.n_compared, 0u);
  EXPECT_LT(check.max_z, 3.0);
}

TEST(Trajectory, BlowupIsReported) {
  // strong drive with large Kerr and a coarse step diverges
  const ChainSpec chain = single_kerr_chain(-1.0, 50.0, 200.0, 1.0);
  EXPECT_THROW(simulate_trajectory(chain, IntegratorConfig{0.5, 500.0, 1, 1, "euler_maruyama"}, 0), NumericalFailure);
}

}  // namespace
}  // namespace qrc
