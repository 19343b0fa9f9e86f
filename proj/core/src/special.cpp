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

#include "qrc/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qrc {

namespace {

constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

cplx log_gamma_complex(cplx z) {
  if (is_pole(z)) throw std::domain_error("log_gamma_complex: pole at non-positive integer");
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma_complex(1.0 - z);
  }
  const cplx x = z - 1.0;
  cplx a = kLanczosC[0];
  for (int k = 1; k < 15; ++k) a += kLanczosC[k] / (x + static_cast<double>(k));
  const cplx t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

cplx gamma_complex(cplx z) { return std::exp(log_gamma_complex(z)); }

cplx ScaledComplex::value() const { return mantissa * std::exp(log_scale); }

ScaledComplex hypergeometric_h_scaled(cplx x, cplx y, double z) {
  if (is_pole(x) || is_pole(y)) throw std::domain_error("hypergeometric_h: parameter at a pole");
  ScaledComplex out;
  cplx term = 1.0;
  cplx sum = 0.0;
  double scale = 0.0;
  constexpr double kBig = 1e200;
  for (long n = 0; n < 10000000; ++n) {
    sum += term;
    const double dn = static_cast<double>(n);
    const cplx ratio = z / ((dn + 1.0) * (x + dn) * (y + dn));
    term *= ratio;
    if (std::abs(sum) > kBig) {
      sum /= kBig;
      term /= kBig;
      scale += std::log(kBig);
    }
    if (std::abs(ratio) < 1.0 && std::abs(term) < 1e-17 * std::abs(sum)) break;
    if (term == 0.0) break;
  }
  out.mantissa = sum;
  out.log_scale = scale;
  return out;
}

cplx hypergeometric_h(cplx x, cplx y, double z) { return hypergeometric_h_scaled(x, y, z).value(); }

cplx complexp_moment(const KerrParams& p, int j, int i) {
  if (p.lambda == 0.0) throw std::invalid_argument("complexp_moment: lambda must be nonzero");
  if (!(p.gamma_t > 0.0)) throw std::invalid_argument("complexp_moment: gamma_t must be > 0");
  if (i < 0 || j < 0) throw std::invalid_argument("complexp_moment: negative power");
  const cplx I(0.0, 1.0);
  const double amp = std::abs(p.eta);
  const double phi = amp > 0.0 ? std::arg(p.eta) : 0.0;
  if (amp == 0.0) return (i == 0 && j == 0) ? cplx(1.0) : cplx(0.0);
  const cplx c = (p.gamma_t - 2.0 * I * p.delta) / (-I * p.lambda);
  const cplx cs = std::conj(c);
  const double z = 8.0 * (amp / p.lambda) * (amp / p.lambda);
  // Gamma(c)/Gamma(c+i) = 1/(c)_i
  cplx poch = 1.0;
  for (int k = 0; k < i; ++k) poch *= c + static_cast<double>(k);
  for (int k = 0; k < j; ++k) poch *= cs + static_cast<double>(k);
  const ScaledComplex num = hypergeometric_h_scaled(c + static_cast<double>(i), cs + static_cast<double>(j), z);
  const ScaledComplex den = hypergeometric_h_scaled(c, cs, z);
  const cplx ratio = num.mantissa / den.mantissa * std::exp(num.log_scale - den.log_scale);
  const double pre = std::pow(2.0 * amp / p.lambda, i + j);
  return std::exp(I * phi * static_cast<double>(i - j)) * pre / poch * ratio;
}

}  // namespace qrc
