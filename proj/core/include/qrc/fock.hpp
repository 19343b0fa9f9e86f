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

#include <Eigen/SparseCore>
#include <vector>

#include "qrc/sde.hpp"

namespace qrc {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using RhoMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kFockMaxDim = 1600;
inline constexpr double kLeakTol = 1e-4;

class CutoffLeakage : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Truncated Fock representation of a chain (at most two modes).  Mode 0 is
// the slowest index.
class FockModel {
 public:
  FockModel(const ChainSpec& chain, std::vector<int> cutoffs);

  std::size_t dim() const { return dim_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  const ChainSpec& chain() const { return chain_; }
  const SpMat& annihilator(std::size_t mode) const { return a_.at(mode); }
  const SpMat& hamiltonian() const { return H_; }
  const std::vector<SpMat>& jump_operators() const { return jumps_; }

  // Lindblad right-hand side L(rho).
  RhoMat lindblad(const RhoMat& rho) const;
  // One Euler-Maruyama step of the heterodyne SME; dW as in NoiseStream,
  // null for the unconditional master equation.  Uses internal scratch
  // buffers, so a model must not be stepped from two threads at once.
  void step(RhoMat& rho, double dt, const double* dW) const;

  cplx expect(const SpMat& op, const RhoMat& rho) const;
  CumulantState cumulants(const RhoMat& rho) const;
  // Largest population of the top Fock level over modes.
  double top_level_population(const RhoMat& rho) const;

  RhoMat vacuum() const;
  // Product of truncated, renormalized coherent states.
  RhoMat coherent(const CVec& alphas) const;
  // Null vector of the dense Liouvillian (small dimensions only).
  RhoMat steady_state_dense() const;

 private:
  ChainSpec chain_;
  std::vector<int> cutoffs_;
  std::size_t dim_ = 1;
  std::vector<SpMat> a_;
  SpMat H_, Heff_;
  std::vector<SpMat> jumps_;
  // Per channel: index into jumps_ of sqrt(gamma) b, or -1.
  std::vector<int> channel_jump_;
  std::vector<SpMat> channel_ops_;
  std::vector<SpMat> pair_bb_, pair_bdb_;
  mutable RhoMat acc_, x_, y_, yt_;
};

struct FockTrajectoryOptions {
  IntegratorConfig integrator;
  std::vector<int> cutoffs;
  double leak_tol = kLeakTol;
  std::size_t leak_check_stride = 100;
  bool conditional = true;
};

// Runs the SME with the noise of trajectory `traj` (same stream as the
// cumulant integrator).  Throws CutoffLeakage when the top level exceeds
// leak_tol.  max_top, if set, receives the largest top-level population seen.
TrajectoryResult simulate_fock_trajectory(const ChainSpec& chain, const FockTrajectoryOptions& opts,
                                          std::uint64_t traj, const CVec* initial_alphas = nullptr,
                                          double* max_top = nullptr);

}  // namespace qrc
