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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/liouvillian.hpp"

namespace qrc {

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_final = 10.0;
  std::uint64_t seed = 1;
  std::size_t store_stride = 100;
  std::string scheme = "euler_maruyama";

  std::size_t n_steps() const;
  void validate() const;
};

// Counter-based standard normals keyed by (seed, trajectory, step, channel,
// quadrature).  Stateless, so any sample can be regenerated on demand.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t trajectory) : seed_(seed), traj_(trajectory) {}
  double normal(std::uint64_t step, std::uint32_t channel, std::uint32_t quad) const;
  // Fills dW[2*ch + quad] = sqrt(dt) * N(0,1) for all channels.
  void increments(std::uint64_t step, std::size_t n_channels, double dt, double* dW) const;

 private:
  std::uint64_t seed_, traj_;
};

std::uint64_t mix64(std::uint64_t x);

// Euler-Maruyama integrator for the conditional (or unconditional) TEOMs.
class Stepper {
 public:
  explicit Stepper(const Model& model, bool conditional = true);

  void set_state(const CumulantState& s);
  CumulantState state() const { return from_doubled(m_, c_); }
  const CVec& doubled_mean() const { return m_; }
  const CMat& doubled_cov() const { return c_; }
  const Model& model() const { return *model_; }

  // dW has 2 entries per channel (X, P); may be null for a noise-free step.
  void step(double dt, const double* dW);
  // Per channel sqrt(gamma/2) <b + b^dag>, sqrt(gamma/2) <-i b + i b^dag>.
  void current_means(double* out) const;
  bool finite() const { return m_.allFinite() && c_.allFinite(); }
  // max |d/dt| of the deterministic part at the current state
  double drift_norm();

 private:
  void rebuild_doubled();

  const Model* model_;
  bool conditional_;
  Eigen::Index n_;
  CVec m_, dm_, xi_x_, xi_p_;
  CMat c_, dc_;
};

struct HeterodyneRecord {
  std::vector<double> times;
  // jx[ch][i], jp[ch][i]: block-averaged currents over each stored interval
  std::vector<std::vector<double>> jx, jp;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  double dt = 0.0;
  std::size_t stride = 1;

  std::size_t n_channels() const { return jx.size(); }
  std::size_t size() const { return times.size(); }
};

struct TrajectoryResult {
  std::vector<CumulantState> states;  // sampled at record.times
  HeterodyneRecord record;
};

using NoiseSource = std::function<void(std::uint64_t step, double* dW)>;

// Observer called after every step with (step index, time, stepper, J values).
using StepObserver = std::function<void(std::size_t, double, const Stepper&, const double*)>;

// Runs one conditional trajectory.  J is sampled as mean part + dW/dt at each
// step, using the state before the step.  Throws NumericalFailure on blowup.
void run_conditional(const Model& model, const IntegratorConfig& cfg, const CumulantState& initial,
                     const NoiseSource& noise, const StepObserver& observer);

TrajectoryResult simulate_trajectory(const ChainSpec& chain, const IntegratorConfig& cfg,
                                     std::uint64_t trajectory_index);
TrajectoryResult simulate_trajectory(const Model& model, const IntegratorConfig& cfg,
                                     std::uint64_t trajectory_index, const CumulantState& initial);

// Drift only: no backaction, no innovations.  States at every store_stride steps.
std::vector<CumulantState> evolve_unconditional(const ChainSpec& chain, const IntegratorConfig& cfg,
                                                const CumulantState& initial, DriftOptions opts = {});

struct SteadyStateOptions {
  double tol = 1e-10;
  double dt = 1e-2;
  double t_max = 1e4;
  DriftOptions drift = {};
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CumulantState steady_state(const ChainSpec& chain, const SteadyStateOptions& opts, const CumulantState& initial);
CumulantState steady_state(const ChainSpec& chain, double tol = 1e-10);

// "STEO" binary trajectory file: magic, u16 version, u32 N_modes, u32
// N_channels, f64 dt, u32 stride, u64 seed, u64 trajectory, u64 sample count,
// then per sample f64 [t | serialized state | JX_0 JP_0 ...], little-endian.
inline constexpr std::uint16_t kSteoVersion = 1;
void write_steo(std::ostream& os, const TrajectoryResult& r);
TrajectoryResult read_steo(std::istream& is);
void write_trajectory_csv(std::ostream& os, const TrajectoryResult& r);

}  // namespace qrc
