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

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrc/state.hpp"

namespace qrc {

// Scaled classical K-node equations (rates in units of the node damping):
//   0 = (i D - 1/2) b_1 - i g b_2 + i |b_1|^2 b_1 + N
//   0 = (i D - 1/2) b_2 - i g b_1 + i |b_2|^2 b_2
// g == 0 is the single-node problem.
struct ClassicalFixedPoint {
  CVec amplitudes;
  bool stable = false;
  bool marginal = false;
  double max_re_eig = 0.0;
  double residual = 0.0;
};

inline constexpr double kMarginalBand = 1e-10;
inline constexpr double kDedupTol = 1e-8;

struct FixedPointReport {
  std::vector<ClassicalFixedPoint> points;
  int failed_starts = 0;  // Newton starts that did not converge
  std::size_t n_stable() const;
  bool any_marginal() const;
};

FixedPointReport classical_fixed_points(double delta, double g, double N);

// Classical right-hand side and Jacobian on (b_1, b_1^*, ..., b_K, b_K^*).
CVec classical_rhs(const CVec& b, double delta, double g, double N);
CMat classical_jacobian(const CVec& b, double delta, double g);

// Real roots of n ((n + D)^2 + 1/4) = N^2 (single node).
std::vector<double> single_node_occupations(double delta, double N);
// Bistable N interval for a single node; empty if D^2 <= 3/4 or D >= 0.
std::optional<std::pair<double, double>> single_node_bistable_interval(double delta);

struct PhaseCell {
  double axis1 = 0.0, axis2 = 0.0;
  int n_fp = 0;
  int n_stable = 0;
  bool marginal = false;
  bool failed = false;
};

// Axes are any two of "delta", "g", "N"; the third takes the fixed value.
struct PhaseDiagramSpec {
  std::string axis1 = "delta", axis2 = "N";
  std::vector<double> values1, values2;
  double delta = -1.0, g = 0.0, N = 0.0;
};

std::vector<PhaseCell> phase_diagram(const PhaseDiagramSpec& spec);
void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells);
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace qrc
