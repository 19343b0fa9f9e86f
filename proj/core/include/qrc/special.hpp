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

#pragma once

#include <complex>

namespace qrc {

using cplx = std::complex<double>;

// ln Gamma(z) by a 15-term Lanczos series, reflected for Re z < 1/2.
// Only exp() of the result is branch independent.
cplx log_gamma_complex(cplx z);
cplx gamma_complex(cplx z);

// Value represented as mantissa * exp(log_scale).
struct ScaledComplex {
  cplx mantissa;
  double log_scale = 0.0;
  cplx value() const;
};

// h(x,y,z) = sum_n z^n/n! Gamma(x)Gamma(y)/(Gamma(x+n)Gamma(y+n)), by the term
// recurrence t_{n+1} = t_n z/((n+1)(x+n)(y+n)).
ScaledComplex hypergeometric_h_scaled(cplx x, cplx y, double z);
cplx hypergeometric_h(cplx x, cplx y, double z);

// Single driven Kerr mode:
//   H = -delta b^dag b - (lambda/2) b^dag b^dag b b + eta b^dag + conj(eta) b,
//   total damping gamma_t = gamma + Gamma.
struct KerrParams {
  double delta = 0.0;
  double lambda = 0.0;
  cplx eta = 0.0;
  double gamma_t = 1.0;
};

// Exact steady-state <(b^dag)^j b^i>.
cplx complexp_moment(const KerrParams& p, int j, int i);

}  // namespace qrc
