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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qrc/liouvillian.hpp"

namespace qrc {

// All rates in units of kappa unless stated otherwise.
struct QRCHyperparams {
  std::size_t K = 2;
  double lambda = 0.005;
  double delta = 0.0;
  double g = 1.0;
  double gamma = 1.0;
  double epsilon = 0.1;
  std::uint64_t sampler_seed = 0;

  void validate() const;
};

struct QRCNodes {
  std::vector<double> lambda, delta, gamma;
  double g12 = 0.0;  // nearest-neighbour beam-splitter rate
  std::size_t K() const { return lambda.size(); }
};

// Lambda_k = L(1 + U[-e, e]), Delta_k = D + gamma U[-e, e], gamma_k = gamma.
QRCNodes sample_random_qrc(const QRCHyperparams& hyper);

// Pointer-state classification: one driven cavity feeding node 1 through a
// directional amplifier.
struct TaskISpec {
  double kappa = 1.0;
  double eta = 15.0;
  double chi1 = 2.0, chi2 = 0.5;
  double Gamma_c = 1.0;  // g_c = Gamma_c
  QRCHyperparams qrc{2, 0.005, 0.0, 1.0, 1.0, 0.0, 0};

  static constexpr int n_classes = 4;
  // Cavity detunings ordered as {chi1+chi2, chi1-chi2, -chi1+chi2, -chi1-chi2}.
  double cavity_detuning(int sigma) const;
};

ChainSpec build_task1_chain(const TaskISpec& spec, int sigma, const QRCNodes& nodes);
double eta_eff_task1(const TaskISpec& spec, int sigma);

// Amplifier-state classification: two-mode amplifier feeding one QRC node
// through a circulator, with an optional phase-preserving post-amplifier.
struct AmplifierClass {
  double eta, G1, G12;
};

struct PostAmpSpec {
  bool enabled = false;
  double G_PA = 0.0;
  double gamma_d1 = 0.5, gamma_d2 = 1.5;
  double g_c = 1.0, Gamma_c = 1.0;
};

struct TaskIISpec {
  double kappa = 1.0;
  std::array<AmplifierClass, 2> classes{{{5.0, 0.3, 0.0}, {8.0, 0.0, 0.3}}};
  double kappa1 = 0.5, kappa2 = 1.0;
  double Gamma_c = 0.5;  // g_c = Gamma_c
  double lambda1 = 0.0027, delta1 = -1.0, gamma1 = 1.0;
  PostAmpSpec pa;

  static constexpr int n_classes = 2;
  const AmplifierClass& cls(int sigma) const;
  // Total QRC node damping.
  double node_damping() const;
};

ChainSpec build_task2_chain(const TaskIISpec& spec, int sigma);
ChainSpec build_task2_pa_chain(const TaskIISpec& spec, int sigma);
// Instance with both classes at effective drive eta_eff and the node
// nonlinearity chosen for the given N_eff.
TaskIISpec task2_instance(const TaskIISpec& base, double eta_eff, double n_eff_target);
double eta_eff_task2(const TaskIISpec& spec, int sigma);

// Two-mode chain (amplifier mode a1 and QRC node b1) used to benchmark the
// cumulant equations against the Fock solver.
struct BenchmarkSpec {
  double kappa1 = 0.5, G1 = 0.3, eta = 0.894;
  double Gamma_c = 0.5;
  double lambda = 0.1, delta = -1.0, gamma = 1.0;
};
ChainSpec build_benchmark_chain(const BenchmarkSpec& spec = {});

// N_eff = (|eta_eff| / gamma_total) sqrt(Lambda / gamma_total).
double n_eff(double eta_eff, double lambda, double gamma_total);

// (<X_a1>, <P_a1>, <X_a2>, <P_a2>) of the driven amplifier.
std::array<double, 4> amplifier_steady_quadratures(const TaskIISpec& spec, int sigma);

// Amplitude gain sqrt(G) of the post-amplifier; throws at or above threshold.
double pa_gain(double G_PA, double gamma_d, double Gamma_t, double gamma_d1);
double pa_for_gain(double sqrt_gain, double gamma_d, double Gamma_t, double gamma_d1);
double pa_for_unit_gain(double kappa = 1.0);

std::vector<std::string> preset_names();

}  // namespace qrc
