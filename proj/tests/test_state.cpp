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

#include <cmath>
#include <random>

#include "qrc/state.hpp"

namespace qrc {
namespace {

cplx power_product(const CVec& a, const MomentIndex& idx) {
  cplx v = 1.0;
  for (std::size_t k = 0; k < idx.plain_powers.size(); ++k) {
    v *= std::pow(std::conj(a(static_cast<Eigen::Index>(k))), idx.dagger_powers[k]);
    v *= std::pow(a(static_cast<Eigen::Index>(k)), idx.plain_powers[k]);
  }
  return v;
}

TEST(ModeNetwork, LabelsAreUniqueAndIndexed) {
  ModeNetwork n({"a1", "b1"});
  EXPECT_EQ(n.index_of("b1"), 1u);
  EXPECT_THROW(ModeNetwork({"x", "x"}), std::invalid_argument);
  EXPECT_THROW(n.index_of("zz"), std::invalid_argument);
}

TEST(CumulantState, VacuumIsPhysicalAndZero) {
  const CumulantState s = vacuum(3);
  EXPECT_TRUE(s.physical());
  EXPECT_EQ(s.structure_defect(), 0.0);
  EXPECT_EQ(s.mu.norm(), 0.0);
}

TEST(Cumulants, MomentRoundTripFourthOrder) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (std::size_t n : {1u, 2u}) {
    MomentMap m;
    for (const auto& idx : all_indices(n, 4)) m[idx] = cplx(g(rng), g(rng));
    const MomentMap back = cumulants_to_moments(moments_to_cumulants(m));
    ASSERT_EQ(back.size(), m.size());
    for (const auto& [idx, v] : m) EXPECT_NEAR(std::abs(back.at(idx) - v), 0.0, 1e-12 * (1.0 + std::abs(v)));
  }
}

TEST(Cumulants, CoherentStateHasNoHigherCumulants) {
  CVec a(2);
  a << cplx(0.7, -1.3), cplx(-2.1, 0.4);
  MomentMap m;
  for (const auto& idx : all_indices(2, 4)) m[idx] = power_product(a, idx);
  for (const auto& [idx, v] : moments_to_cumulants(m)) {
    if (idx.order() == 1) EXPECT_NEAR(std::abs(v - power_product(a, idx)), 0.0, 1e-12);
    else EXPECT_NEAR(std::abs(v), 0.0, 1e-11) << "order " << idx.order();
  }
}

TEST(Cumulants, CoherentStateConstructor) {
  CVec a(2);
  a << cplx(1.0, 2.0), cplx(-0.5, 0.0);
  const CumulantState s = coherent_state(ModeNetwork::anonymous(2), a);
  EXPECT_EQ((s.mu - a).norm(), 0.0);
  EXPECT_EQ(s.c_bb.norm() + s.c_bdb.norm(), 0.0);
  const MomentMap c = cumulant_map(s, 2);
  for (const auto& [idx, v] : c)
    if (idx.order() == 2) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Cumulants, ConversionRejectsFifthOrder) { EXPECT_THROW(all_indices(1, 5), std::invalid_argument); }

TEST(CumulantState, DoubledRepresentationRoundTrip) {
  CumulantState s = vacuum(2);
  s.mu << cplx(1, 2), cplx(3, -1);
  s.c_bb << cplx(0.1, 0.2), cplx(0.05, -0.01), cplx(0.05, -0.01), cplx(-0.3, 0.0);
  s.c_bdb << 0.4, cplx(0.02, 0.03), cplx(0.02, -0.03), 0.1;
  const CumulantState r = from_doubled(doubled_mean(s), doubled_cumulants(s));
  EXPECT_NEAR((r.mu - s.mu).norm(), 0.0, 1e-15);
  EXPECT_NEAR((r.c_bb - s.c_bb).norm(), 0.0, 1e-15);
  EXPECT_NEAR((r.c_bdb - s.c_bdb).norm(), 0.0, 1e-15);
  const CMat C = doubled_cumulants(s);
  // C_{b_i^dag, b_j} sits in the lower-left block
  EXPECT_EQ(C(2 + 0, 1), s.c_bdb(0, 1));
}

TEST(CumulantState, SerializeRoundTrip) {
  CumulantState s = vacuum(3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 3; ++i) s.mu(i) = cplx(g(rng), g(rng));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      s.c_bb(i, j) = s.c_bb(j, i) = cplx(g(rng), g(rng));
      if (i == j) s.c_bdb(i, i) = std::abs(g(rng));
      else {
        s.c_bdb(i, j) = cplx(g(rng), g(rng));
        s.c_bdb(j, i) = std::conj(s.c_bdb(i, j));
      }
    }
  const std::vector<double> flat = serialize(s);
  EXPECT_EQ(flat.size(), flat_size(3));
  EXPECT_EQ(flat_size(2), 14u);
  const CumulantState r = deserialize(flat, 3);
  EXPECT_EQ(serialize(r), flat);
  EXPECT_THROW(deserialize(std::vector<double>(5), 3), std::invalid_argument);
}

TEST(CumulantState, PhysicalityFlagsNegativeOccupation) {
  CumulantState s = vacuum(1);
  s.c_bdb(0, 0) = -1e-3;
  EXPECT_FALSE(s.physical());
  s.c_bdb(0, 0) = -1e-12;
  EXPECT_TRUE(s.physical());
}

TEST(Quadratures, VacuumAndSqueezedVariances) {
  CumulantState s = vacuum(1);
  QuadratureStats q = quadrature_stats(s, 0);
  EXPECT_NEAR(q.var_max, 0.5, 1e-15);
  EXPECT_NEAR(q.var_min, 0.5, 1e-15);
  s.c_bdb(0, 0) = 0.3;
  s.c_bb(0, 0) = cplx(0.0, 0.2);
  q = quadrature_stats(s, 0);
  EXPECT_NEAR(q.var_max, 0.5 + 0.3 + 0.2, 1e-14);
  EXPECT_NEAR(q.var_min, 0.5 + 0.3 - 0.2, 1e-14);
  EXPECT_THROW(quadrature_stats(s, 4), std::out_of_range);
}

}  // namespace
}  // namespace qrc
