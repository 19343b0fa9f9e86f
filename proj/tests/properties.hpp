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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qrc/learn.hpp"
#include "qrc/tasks.hpp"

namespace qrc::properties {

// Largest |moment - moment'| after a moment -> cumulant -> moment round trip of random data.
inline double moment_round_trip_error(std::size_t n_modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MomentMap m;
  for (const auto& idx : all_indices(n_modes, kMaxConversionOrder)) m[idx] = cplx(g(rng), g(rng));
  const MomentMap back = cumulants_to_moments(moments_to_cumulants(m));
  double err = 0.0;
  for (const auto& [idx, v] : m) err = std::max(err, std::abs(back.at(idx) - v) / (1.0 + std::abs(v)));
  return err;
}

// Largest cumulant of order >= 2 for coherent-state moments <(b^dag)^p b^q> = conj(a)^p a^q.
inline double coherent_nullity_error(const CVec& a) {
  MomentMap m;
  for (const auto& idx : all_indices(static_cast<std::size_t>(a.size()), kMaxConversionOrder)) {
    cplx v = 1.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
      v *= std::pow(std::conj(a(k)), idx.dagger_powers[static_cast<std::size_t>(k)]) *
           std::pow(a(k), idx.plain_powers[static_cast<std::size_t>(k)]);
    m[idx] = v;
  }
  double err = 0.0;
  for (const auto& [idx, v] : moments_to_cumulants(m))
    if (idx.order() >= 2) err = std::max(err, std::abs(v));
  return err;
}

// Linear chain without squeezing, every mode monitored.
inline ChainSpec monitored_linear_chain() {
  ChainSpec c;
  c.network = ModeNetwork({"a", "b"});
  c.blocks = {Detuning{0, 0.7}, Detuning{1, -0.4}, CoherentDrive{0, cplx(1.2, -0.3)}, BeamSplitter{0, 1, 0.5},
              CirculatorCoupling{0, 1, 0.5, 0.5}};
  c.add_loss(0, 1.0, true);
  c.add_loss(1, 0.8, true);
  return c;
}

// Largest second cumulant reached in any step of a conditional trajectory from a coherent state.
inline double conditional_coherent_drift(std::size_t n_steps, double dt = 1e-3) {
  const ChainSpec chain = monitored_linear_chain();
  Model model(chain);
  Stepper st(model, true);
  CVec a(2);
  a << cplx(0.5, 0.2), cplx(-0.1, 0.3);
  st.set_state(coherent_state(chain.network, a));
  NoiseStream ns(11, 0);
  std::vector<double> dW(2 * model.n_channels());
  double worst = 0.0;
  for (std::size_t s = 0; s < n_steps; ++s) {
    ns.increments(s, model.n_channels(), dt, dW.data());
    st.step(dt, dW.data());
    worst = std::max(worst, st.doubled_cov().cwiseAbs().maxCoeff());
  }
  return worst;
}

struct EnsembleCheck {
  double max_z = 0.0;  // largest |ensemble - unconditional| / standard error
  std::size_t n_compared = 0;
};

// Conditional ensemble first moments and occupations at t_final against the unconditional evolution.
inline EnsembleCheck ensemble_vs_unconditional(int n_traj, unsigned workers = 1) {
  ChainSpec chain;
  chain.network = ModeNetwork({"a", "b"});
  chain.blocks = {Detuning{0, 0.5}, CoherentDrive{0, cplx(0.8, 0.4)}, DegenerateParametric{0, 0.2, 0.3},
                  DirectionalAmpCoupling{0, 1, 0.6, 0.6}, Detuning{1, -0.3}};
  chain.add_loss(0, 1.0, true);
  chain.add_loss(1, 0.6, true);
  const IntegratorConfig cfg{1e-3, 3.0, 5, 500, "euler_maruyama"};
  const std::vector<CumulantState> ref = evolve_unconditional(chain, cfg, vacuum(chain.network));
  Model model(chain);
  std::vector<std::vector<CumulantState>> runs(static_cast<std::size_t>(n_traj));
  parallel_for(runs.size(), workers,
               [&](std::size_t i) { runs[i] = simulate_trajectory(model, cfg, i, vacuum(chain.network)).states; });
  EnsembleCheck out;
  auto compare = [&](const std::vector<double>& x, double expected) {
    double m = 0.0, v = 0.0;
    for (double xi : x) m += xi;
    m /= static_cast<double>(x.size());
    for (double xi : x) v += (xi - m) * (xi - m);
    v /= static_cast<double>(x.size() - 1);
    const double se = std::sqrt(v / static_cast<double>(x.size()));
    const double z = se > 0.0 ? std::abs(m - expected) / se : (std::abs(m - expected) > 1e-12 ? 1e300 : 0.0);
    out.max_z = std::max(out.max_z, z);
    ++out.n_compared;
  };
  const std::size_t t = ref.size() - 1;
  for (Eigen::Index k = 0; k < 2; ++k) {
    std::vector<double> re, im, occ;
    for (const auto& r : runs) {
      const CumulantState& s = r.at(t);
      re.push_back(s.mu(k).real());
      im.push_back(s.mu(k).imag());
      occ.push_back(s.c_bdb(k, k).real() + std::norm(s.mu(k)));
    }
    compare(re, ref[t].mu(k).real());
    compare(im, ref[t].mu(k).imag());
    compare(occ, ref[t].c_bdb(k, k).real() + std::norm(ref[t].mu(k)));
  }
  return out;
}

// Serialized trajectory for byte-level comparison.
inline std::string steo_bytes(const ChainSpec& chain, const IntegratorConfig& cfg, std::uint64_t traj) {
  std::ostringstream os;
  write_steo(os, simulate_trajectory(chain, cfg, traj));
  return os.str();
}

// Largest change in predictions or scores when a constant is added to every logit.
inline bool softmax_shift_invariant(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  OutputLayer layer;
  layer.W = RMat(4, 3);
  layer.b = RVec(4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    layer.b(i) = g(rng);
    for (Eigen::Index j = 0; j < 3; ++j) layer.W(i, j) = g(rng);
  }
  OutputLayer shifted = layer;
  shifted.b.array() += 37.5;
  for (int trial = 0; trial < 200; ++trial) {
    RVec x(3);
    for (Eigen::Index j = 0; j < 3; ++j) x(j) = 3.0 * g(rng);
    if (predict(layer, x) != predict(shifted, x)) return false;
    if ((scores(layer, x) - scores(shifted, x)).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

// Points on the (i, j) decision boundary give equal scores to classes i and j.
inline double boundary_tie_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  OutputLayer layer;
  layer.W = RMat(3, 2);
  layer.b = RVec(3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    layer.b(i) = g(rng);
    for (Eigen::Index j = 0; j < 2; ++j) layer.W(i, j) = g(rng);
  }
  double worst = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) {
      const Hyperplane h = decision_boundary(layer, i, j);
      // foot of the perpendicular from a random point onto the plane
      for (int trial = 0; trial < 50; ++trial) {
        RVec x(2);
        x << 2.0 * g(rng), 2.0 * g(rng);
        x -= ((h.normal.dot(x) + h.offset) / h.normal.squaredNorm()) * h.normal;
        const RVec s = scores(layer, x);
        worst = std::max(worst, std::abs(s(i - 1) - s(j - 1)) / std::max(s(i - 1), 1e-300));
      }
    }
  return worst;
}

}  // namespace qrc::properties
