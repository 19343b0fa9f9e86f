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

#include "qrc/chains.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qrc {

namespace {

const cplx I(0.0, 1.0);

void check_sigma(int sigma, int n) {
  if (sigma < 1 || sigma > n) throw std::invalid_argument("invalid class label " + std::to_string(sigma));
}

// Uniform on [-e, e] from raw 64-bit engine output (portable across stdlibs).
double centered_uniform(std::mt19937_64& rng, double e) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return e * (2.0 * u - 1.0);
}

void add_qrc_node(ChainSpec& c, std::size_t mode, double lambda, double delta, double gamma, bool monitored) {
  if (delta != 0.0) c.blocks.push_back(Detuning{mode, delta});
  if (lambda != 0.0) c.blocks.push_back(Kerr{mode, lambda});
  if (gamma > 0.0) c.add_loss(mode, gamma, monitored);
}

}  // namespace

void QRCHyperparams::validate() const {
  if (K < 1) throw std::invalid_argument("QRCHyperparams: K must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("QRCHyperparams: gamma must be > 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("QRCHyperparams: epsilon must be in [0,1)");
  if (lambda < 0.0) throw std::invalid_argument("QRCHyperparams: lambda must be >= 0");
}

QRCNodes sample_random_qrc(const QRCHyperparams& h) {
  h.validate();
  std::mt19937_64 rng(h.sampler_seed);
  QRCNodes q;
  q.g12 = h.g;
  for (std::size_t k = 0; k < h.K; ++k) {
    q.lambda.push_back(h.lambda * (1.0 + centered_uniform(rng, h.epsilon)));
    q.delta.push_back(h.delta + h.gamma * centered_uniform(rng, h.epsilon));
    q.gamma.push_back(h.gamma);
  }
  return q;
}

double TaskISpec::cavity_detuning(int sigma) const {
  check_sigma(sigma, n_classes);
  const double d[4] = {chi1 + chi2, chi1 - chi2, -chi1 + chi2, -chi1 - chi2};
  return d[sigma - 1];
}

ChainSpec build_task1_chain(const TaskISpec& spec, int sigma, const QRCNodes& nodes) {
  check_sigma(sigma, TaskISpec::n_classes);
  if (nodes.K() < 1) throw std::invalid_argument("build_task1_chain: empty QRC");
  std::vector<std::string> labels{"a1"};
  for (std::size_t k = 0; k < nodes.K(); ++k) labels.push_back("b" + std::to_string(k + 1));
  ChainSpec c;
  c.network = ModeNetwork(labels);
  c.blocks.push_back(Detuning{0, spec.cavity_detuning(sigma)});
  c.blocks.push_back(CoherentDrive{0, cplx(spec.eta, 0.0)});
  c.add_loss(0, spec.kappa, false);
  c.blocks.push_back(DirectionalAmpCoupling{0, 1, spec.Gamma_c, spec.Gamma_c});
  for (std::size_t k = 0; k < nodes.K(); ++k)
    add_qrc_node(c, k + 1, nodes.lambda[k], nodes.delta[k], nodes.gamma[k], true);
  if (nodes.g12 != 0.0)
    for (std::size_t k = 0; k + 1 < nodes.K(); ++k) c.blocks.push_back(BeamSplitter{k + 1, k + 2, nodes.g12});
  c.validate();
  return c;
}

double eta_eff_task1(const TaskISpec& spec, int sigma) {
  const double d = spec.cavity_detuning(sigma);
  return -2.0 * spec.Gamma_c * spec.eta * d / (d * d + spec.kappa * spec.kappa / 4.0);
}

const AmplifierClass& TaskIISpec::cls(int sigma) const {
  check_sigma(sigma, n_classes);
  return classes[static_cast<std::size_t>(sigma - 1)];
}

double TaskIISpec::node_damping() const { return pa.enabled ? Gamma_c + pa.Gamma_c : gamma1 + Gamma_c; }

namespace {

// Amplifier modes a1, a2 and node b1.  The drive enters as d<a1>/dt = eta and
// both parametric terms as d<a>/dt = G <a'^dag>.
ChainSpec amplifier_front(const TaskIISpec& spec, int sigma, std::vector<std::string> extra) {
  const AmplifierClass& k = spec.cls(sigma);
  std::vector<std::string> labels{"a1", "a2", "b1"};
  for (auto& e : extra) labels.push_back(e);
  ChainSpec c;
  c.network = ModeNetwork(labels);
  c.blocks.push_back(CoherentDrive{0, I * k.eta});
  if (k.G1 != 0.0) c.blocks.push_back(DegenerateParametric{0, k.G1, -std::numbers::pi / 2.0});
  if (k.G12 != 0.0) c.blocks.push_back(NonDegenerateParametric{0, 1, k.G12, -std::numbers::pi / 2.0});
  c.add_loss(0, spec.kappa1, false);
  c.add_loss(1, spec.kappa2, false);
  c.blocks.push_back(CirculatorCoupling{0, 2, spec.Gamma_c, spec.Gamma_c});
  return c;
}

}  // namespace

ChainSpec build_task2_chain(const TaskIISpec& spec, int sigma) {
  if (spec.pa.enabled) return build_task2_pa_chain(spec, sigma);
  ChainSpec c = amplifier_front(spec, sigma, {});
  add_qrc_node(c, 2, spec.lambda1, spec.delta1, spec.gamma1, true);
  c.validate();
  return c;
}

ChainSpec build_task2_pa_chain(const TaskIISpec& spec, int sigma) {
  ChainSpec c = amplifier_front(spec, sigma, {"d1", "d2"});
  // the node loses energy only into the post-amplifier
  add_qrc_node(c, 2, spec.lambda1, spec.delta1, 0.0, false);
  c.blocks.push_back(CirculatorCoupling{2, 3, spec.pa.g_c, spec.pa.Gamma_c});
  if (spec.pa.G_PA != 0.0) c.blocks.push_back(NonDegenerateParametric{3, 4, spec.pa.G_PA, 0.0});
  c.add_loss(3, spec.pa.gamma_d1, true);
  c.add_loss(4, spec.pa.gamma_d2, false);
  c.validate();
  return c;
}

double eta_eff_task2(const TaskIISpec& spec, int sigma) {
  const AmplifierClass& k = spec.cls(sigma);
  const double den = 4.0 * k.G12 * k.G12 + spec.kappa * (2.0 * k.G1 - spec.kappa);
  if (std::abs(den) < 1e-14) throw std::domain_error("eta_eff_task2: amplifier at threshold");
  return 2.0 * spec.Gamma_c * spec.kappa * k.eta / den;
}

TaskIISpec task2_instance(const TaskIISpec& base, double eta_eff, double n_eff_target) {
  TaskIISpec s = base;
  for (int sigma = 1; sigma <= 2; ++sigma) {
    AmplifierClass& k = s.classes[static_cast<std::size_t>(sigma - 1)];
    k.eta = 1.0;
    k.eta = std::abs(eta_eff / eta_eff_task2(s, sigma));
  }
  const double gt = s.node_damping();
  const double r = n_eff_target * gt / std::abs(eta_eff);
  s.lambda1 = gt * r * r;
  return s;
}

ChainSpec build_benchmark_chain(const BenchmarkSpec& spec) {
  ChainSpec c;
  c.network = ModeNetwork({"a1", "b1"});
  c.blocks.push_back(CoherentDrive{0, I * spec.eta});
  c.blocks.push_back(DegenerateParametric{0, spec.G1, -std::numbers::pi / 2.0});
  c.add_loss(0, spec.kappa1, false);
  c.blocks.push_back(CirculatorCoupling{0, 1, spec.Gamma_c, spec.Gamma_c});
  add_qrc_node(c, 1, spec.lambda, spec.delta, spec.gamma, true);
  c.validate();
  return c;
}

double n_eff(double eta_eff, double lambda, double gamma_total) {
  if (!(gamma_total > 0.0)) throw std::invalid_argument("n_eff: gamma_total must be > 0");
  if (lambda < 0.0) throw std::invalid_argument("n_eff: lambda must be >= 0");
  return std::abs(eta_eff) / gamma_total * std::sqrt(lambda / gamma_total);
}

std::array<double, 4> amplifier_steady_quadratures(const TaskIISpec& spec, int sigma) {
  const AmplifierClass& k = spec.cls(sigma);
  const double kap = spec.kappa;
  const double den = 4.0 * k.G12 * k.G12 + kap * (2.0 * k.G1 - kap);
  if (std::abs(den) < 1e-14) throw std::domain_error("amplifier_steady_quadratures: amplifier at threshold");
  const double a1 = -2.0 * kap * k.eta / den;
  const double a2 = 2.0 * k.G12 / kap * a1;
  const double r2 = std::sqrt(2.0);
  return {r2 * a1, 0.0, r2 * a2, 0.0};
}

double pa_gain(double G_PA, double gamma_d, double Gamma_t, double gamma_d1) {
  if (G_PA < 0.0 || G_PA >= gamma_d / 2.0) throw std::domain_error("pa_gain: G_PA outside [0, gamma_d/2)");
  return -2.0 * gamma_d * std::sqrt(Gamma_t * gamma_d1) / (4.0 * G_PA * G_PA - gamma_d * gamma_d);
}

double pa_for_gain(double sqrt_gain, double gamma_d, double Gamma_t, double gamma_d1) {
  const double v = gamma_d * gamma_d - 2.0 * gamma_d * std::sqrt(Gamma_t * gamma_d1) / sqrt_gain;
  if (!(sqrt_gain > 0.0) || v < 0.0) throw std::domain_error("pa_for_gain: gain not reachable");
  return 0.5 * std::sqrt(v);
}

double pa_for_unit_gain(double kappa) { return pa_for_gain(1.0, 1.5 * kappa, kappa, 0.5 * kappa); }

std::vector<std::string> preset_names() { return {"task1-fig4", "task2-fig6", "task2-pa"}; }

}  // namespace qrc
