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

#include "qrc/fixed_points.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qrc {

namespace {

const cplx I(0.0, 1.0);

double max_real_eigenvalue(const CMat& J) {
  Eigen::ComplexEigenSolver<CMat> es(J, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("fixed points: eigen solve failed");
  return es.eigenvalues().real().maxCoeff();
}

void classify(ClassicalFixedPoint& fp, double delta, double g) {
  fp.max_re_eig = max_real_eigenvalue(classical_jacobian(fp.amplitudes, delta, g));
  fp.marginal = std::abs(fp.max_re_eig) <= kMarginalBand;
  fp.stable = fp.max_re_eig < -kMarginalBand;
}

double rhs_norm(const CVec& b, double delta, double g, double N) {
  return classical_rhs(b, delta, g, N).norm();
}

bool already_found(const std::vector<ClassicalFixedPoint>& pts, const CVec& b) {
  for (const auto& p : pts)
    if ((p.amplitudes - b).norm() < kDedupTol * std::max(1.0, b.norm())) return true;
  return false;
}

// Damped Newton on the (b, b^*) system.  Returns false on non-convergence.
bool newton(CVec& b, double delta, double g, double N) {
  const Eigen::Index K = b.size();
  double f = rhs_norm(b, delta, g, N);
  for (int it = 0; it < 300; ++it) {
    if (f < 1e-13 * std::max(1.0, std::abs(N))) return true;
    const CVec F = classical_rhs(b, delta, g, N);
    const CMat J = classical_jacobian(b, delta, g);
    const CVec d = J.fullPivLu().solve(-F);
    if (!d.allFinite()) return false;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      CVec trial = b;
      for (Eigen::Index k = 0; k < K; ++k) trial(k) += step * d(2 * k);
      const double ft = rhs_norm(trial, delta, g, N);
      if (std::isfinite(ft) && ft < f) {
        b = trial;
        f = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return f < 1e-10 * std::max(1.0, std::abs(N));
  }
  return f < 1e-11 * std::max(1.0, std::abs(N));
}

// Real roots of n^3 + a n^2 + b n + c, polished by Newton.
std::vector<double> real_cubic_roots(double a, double b, double c) {
  std::vector<double> roots;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double q3 = q * q * q;
  if (r * r < q3) {
    const double th = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
    const double s = -2.0 * std::sqrt(q);
    for (int k = 0; k < 3; ++k) roots.push_back(s * std::cos((th + 2.0 * std::numbers::pi * k) / 3.0) - a / 3.0);
  } else {
    const double A = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
    const double B = A != 0.0 ? q / A : 0.0;
    roots.push_back(A + B - a / 3.0);
  }
  for (double& x : roots) {
    for (int it = 0; it < 50; ++it) {
      const double p = ((x + a) * x + b) * x + c;
      const double dp = (3.0 * x + 2.0 * a) * x + b;
      if (dp == 0.0) break;
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

FixedPointReport single_node(double delta, double N) {
  FixedPointReport rep;
  for (double n : single_node_occupations(delta, N)) {
    ClassicalFixedPoint fp;
    fp.amplitudes = CVec(1);
    fp.amplitudes(0) = -N / (I * (delta + n) - 0.5);
    fp.residual = rhs_norm(fp.amplitudes, delta, 0.0, N);
    if (already_found(rep.points, fp.amplitudes)) continue;
    classify(fp, delta, 0.0);
    rep.points.push_back(fp);
  }
  return rep;
}

using Poly = std::vector<cplx>;  // lowest degree first

Poly pmul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly padd(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Poly pconj(Poly a) {
  for (auto& c : a) c = std::conj(c);
  return a;
}

// Candidate n2 values: positive real roots of n2 |(i(D + n1) - 1/2) z - i g|^2 - N^2 with
// z = (D + n2 + i/2)/g and n1 = n2 |z|^2 (node 2 gives b1 = z b2).
std::vector<double> two_node_occupations(double delta, double g, double N) {
  const Poly z = {(delta + 0.5 * I) / g, 1.0 / g};
  const Poly n1 = pmul({0.0, 1.0}, pmul(z, pconj(z)));
  Poly inner = n1;
  for (auto& c : inner) c *= I;
  inner = padd(inner, {I * delta - 0.5});
  const Poly P = padd(pmul(inner, z), {-I * g});
  const Poly F = padd(pmul({0.0, 1.0}, pmul(P, pconj(P))), {-N * N});
  const Eigen::Index deg = static_cast<Eigen::Index>(F.size()) - 1;
  RMat comp = RMat::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -F[static_cast<std::size_t>(i)].real() / F.back().real();
  Eigen::EigenSolver<RMat> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("fixed points: companion eigen solve failed");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < deg; ++i) {
    const cplx r = es.eigenvalues()(i);
    if (r.real() > 0.0 && std::abs(r.imag()) <= 1e-5 * (1.0 + std::abs(r))) out.push_back(r.real());
  }
  return out;
}

FixedPointReport two_node(double delta, double g, double N) {
  FixedPointReport rep;
  std::vector<CVec> starts;
  if (N == 0.0) starts.push_back(CVec::Zero(2));
  for (double n2 : two_node_occupations(delta, g, N)) {
    const cplx z = (delta + n2 + 0.5 * I) / g;
    const double n1 = n2 * std::norm(z);
    CVec s(2);
    s(1) = -N / ((I * (delta + n1) - 0.5) * z - I * g);
    s(0) = z * s(1);
    starts.push_back(s);
  }
  for (CVec b : starts) {
    if (!newton(b, delta, g, N)) {
      ++rep.failed_starts;
      continue;
    }
    if (already_found(rep.points, b)) continue;
    ClassicalFixedPoint fp;
    fp.amplitudes = b;
    fp.residual = rhs_norm(b, delta, g, N);
    classify(fp, delta, g);
    rep.points.push_back(fp);
  }
  return rep;
}

}  // namespace

std::size_t FixedPointReport::n_stable() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.stable; }));
}

bool FixedPointReport::any_marginal() const {
  return std::any_of(points.begin(), points.end(), [](const auto& p) { return p.marginal; });
}

CVec classical_rhs(const CVec& b, double delta, double g, double N) {
  const Eigen::Index K = b.size();
  if (K != 1 && K != 2) throw std::invalid_argument("classical_rhs: K must be 1 or 2");
  CVec F(2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    cplx f = (I * delta - 0.5) * b(k) + I * std::norm(b(k)) * b(k);
    if (K == 2) f -= I * g * b(1 - k);
    if (k == 0) f += N;
    F(2 * k) = f;
    F(2 * k + 1) = std::conj(f);
  }
  return F;
}

CMat classical_jacobian(const CVec& b, double delta, double g) {
  const Eigen::Index K = b.size();
  CMat J = CMat::Zero(2 * K, 2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double n = std::norm(b(k));
    J(2 * k, 2 * k) = -0.5 + I * delta + 2.0 * I * n;
    J(2 * k, 2 * k + 1) = I * b(k) * b(k);
    J(2 * k + 1, 2 * k) = -I * std::conj(b(k) * b(k));
    J(2 * k + 1, 2 * k + 1) = -0.5 - I * delta - 2.0 * I * n;
    if (K == 2) {
      const Eigen::Index o = 1 - k;
      J(2 * k, 2 * o) = -I * g;
      J(2 * k + 1, 2 * o + 1) = I * g;
    }
  }
  return J;
}

std::vector<double> single_node_occupations(double delta, double N) {
  if (N == 0.0) return {0.0};
  std::vector<double> out;
  for (double n : real_cubic_roots(2.0 * delta, delta * delta + 0.25, -N * N))
    if (n > 0.0) out.push_back(n);
  return out;
}

std::optional<std::pair<double, double>> single_node_bistable_interval(double delta) {
  // f(n) = n ((n + D)^2 + 1/4) has extrema at n = (-4D -+ sqrt(4D^2 - 3)) / 6
  const double disc = 4.0 * delta * delta - 3.0;
  if (delta >= 0.0 || disc <= 0.0) return std::nullopt;
  const double n_max = (-4.0 * delta - std::sqrt(disc)) / 6.0;  // local max of f
  const double n_min = (-4.0 * delta + std::sqrt(disc)) / 6.0;  // local min of f
  auto f = [&](double n) { return n * ((n + delta) * (n + delta) + 0.25); };
  return std::make_pair(std::sqrt(f(n_min)), std::sqrt(f(n_max)));
}

FixedPointReport classical_fixed_points(double delta, double g, double N) {
  if (!std::isfinite(delta) || !std::isfinite(g) || !std::isfinite(N))
    throw std::invalid_argument("classical_fixed_points: non-finite parameter");
  return g == 0.0 ? single_node(delta, N) : two_node(delta, g, N);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<PhaseCell> phase_diagram(const PhaseDiagramSpec& spec) {
  auto slot = [](const std::string& name, double& d, double& g, double& N) -> double& {
    if (name == "delta") return d;
    if (name == "g") return g;
    if (name == "N") return N;
    throw std::invalid_argument("phase_diagram: unknown axis '" + name + "'");
  };
  if (spec.axis1 == spec.axis2) throw std::invalid_argument("phase_diagram: axes must differ");
  std::vector<PhaseCell> cells;
  cells.reserve(spec.values1.size() * spec.values2.size());
  for (double v1 : spec.values1) {
    for (double v2 : spec.values2) {
      double d = spec.delta, g = spec.g, N = spec.N;
      slot(spec.axis1, d, g, N) = v1;
      slot(spec.axis2, d, g, N) = v2;
      const FixedPointReport rep = classical_fixed_points(d, g, N);
      PhaseCell c;
      c.axis1 = v1;
      c.axis2 = v2;
      c.n_fp = static_cast<int>(rep.points.size());
      c.n_stable = static_cast<int>(rep.n_stable());
      c.marginal = rep.any_marginal();
      c.failed = rep.failed_starts > 0 && rep.points.empty();
      cells.push_back(c);
    }
  }
  return cells;
}

void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << "axis1,axis2,n_fp,n_stable,marginal,failed\n";
  os.precision(17);
  for (const auto& c : cells)
    os << c.axis1 << ',' << c.axis2 << ',' << c.n_fp << ',' << c.n_stable << ',' << (c.marginal ? 1 : 0) << ','
       << (c.failed ? 1 : 0) << '\n';
}

}  // namespace qrc
