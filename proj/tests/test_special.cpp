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

#include "qrc/fock.hpp"
#include "qrc/special.hpp"
#include "qrc/tasks.hpp"

namespace qrc {
namespace {

TEST(Special, LogGammaMatchesRealLgamma) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 30.0, 171.5}) {
    const cplx v = log_gamma_complex(cplx(x, 0.0));
    EXPECT_NEAR(v.real(), std::lgamma(x), 1e-12 * (1.0 + std::abs(std::lgamma(x))));
  }
}

TEST(Special, GammaRecurrenceAndReflection) {
  const cplx I(0.0, 1.0);
  for (cplx z : {cplx(0.3, 2.0), cplx(-1.7, 0.4), cplx(5.0, -3.0), cplx(0.5, 40.0)}) {
    // log Gamma(z + 1) = log Gamma(z) + log z modulo 2 pi i
    const cplx d = log_gamma_complex(z + 1.0) - log_gamma_complex(z) - std::log(z);
    EXPECT_NEAR(d.real(), 0.0, 1e-11);
    EXPECT_NEAR(std::remainder(d.imag(), 2.0 * M_PI), 0.0, 1e-10);
  }
  // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
  const double y = 1.3;
  EXPECT_NEAR(std::norm(gamma_complex(0.5 + I * y)), M_PI / std::cosh(M_PI * y), 1e-12);
}

TEST(Special, HypergeometricSeriesEdgeCase) {
  // zero argument gives one; scaled form agrees with the plain value
  EXPECT_NEAR(std::abs(hypergeometric_h(cplx(1.5, 2.0), cplx(1.5, -2.0), 0.0) - 1.0), 0.0, 1e-15);
  const cplx x(0.7, -3.0), y(0.7, 3.0);
  const ScaledComplex s = hypergeometric_h_scaled(x, y, 5.0);
  EXPECT_NEAR(std::abs(s.value() - hypergeometric_h(x, y, 5.0)), 0.0, 1e-12 * std::abs(s.value()));
}

TEST(Special, ComplexPZeroPowerIsOne) {
  const KerrParams p{-1.0, 0.05, cplx(0.5, 0.2), 1.0};
  EXPECT_NEAR(std::abs(complexp_moment(p, 0, 0) - 1.0), 0.0, 1e-12);
  // <b^dag^j b^i> = conj(<b^dag^i b^j>)
  EXPECT_NEAR(std::abs(complexp_moment(p, 2, 1) - std::conj(complexp_moment(p, 1, 2))), 0.0, 1e-12);
  EXPECT_THROW(complexp_moment(KerrParams{-1.0, 0.0, 1.0, 1.0}, 0, 1), std::invalid_argument);
}

class ComplexPVsFock : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(ComplexPVsFock, SteadyMomentsAgree) {
  const auto [lr, N] = GetParam();
  const double eta = drive_for_n(N, lr, 1.0);
  const ChainSpec chain = single_kerr_chain(-1.0, lr, eta, 1.0, false);
  FockModel fm(chain, {40});
  const RhoMat rho = fm.steady_state_dense();
  ASSERT_LT(fm.top_level_population(rho), 1e-8);
  const KerrParams kp{-1.0, lr, eta, 1.0};
  const SpMat& a = fm.annihilator(0);
  const SpMat ad = SpMat(a.adjoint());
  auto rel = [](cplx x, cplx y) { return std::abs(x - y) / (1.0 + std::abs(y)); };
  EXPECT_LT(rel(fm.expect(a, rho), complexp_moment(kp, 0, 1)), 1e-6);
  EXPECT_LT(rel(fm.expect(SpMat(ad * a), rho), complexp_moment(kp, 1, 1)), 1e-6);
  EXPECT_LT(rel(fm.expect(SpMat(a * a), rho), complexp_moment(kp, 0, 2)), 1e-6);
  EXPECT_LT(rel(fm.expect(SpMat(ad * SpMat(a * a)), rho), complexp_moment(kp, 1, 2)), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Grid, ComplexPVsFock,
                         ::testing::Values(std::pair{0.05, 0.2}, std::pair{0.05, 0.45}, std::pair{0.2, 0.3},
                                           std::pair{0.5, 0.5}));

}  // namespace
}  // namespace qrc
