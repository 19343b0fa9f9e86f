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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "../oracles.hpp"
#include "../properties.hpp"
#include "qrc/fixed_points.hpp"
#include "qrc/tasks.hpp"

namespace {

using namespace qrc;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned g_workers = 1;

// 1. TEOM steady state against complex-P.
Verdict steady_oracle() {
  const KerrOracleReport r = kerr_steady_oracle(-1.0, {0.005, 0.02, 0.05}, linspace(0.1, 0.45, 20), 1.0, g_workers);
  const double e1 = r.max_err(0.005), e2 = r.max_err(0.02), e3 = r.max_err(0.05);
  double n_ok = 0.45;
  for (const auto& p : r.points)
    if (p.lambda_ratio == 0.05 && p.max_err() > 0.10) n_ok = std::min(n_ok, p.N);
  Verdict v;
  v.pass = e1 <= 0.02 && e2 <= 0.10 && e3 <= 0.10;
  v.detail = fmt("max rel err %.4f (<=0.02) @0.005, %.4f (<=0.10) @0.02, %.4f (<=0.10) @0.05; first N over 10%% @0.05: %.3f",
                 e1, e2, e3, n_ok);
  return v;
}

// 2. Conditional STEOM against the Fock SME with matched noise.
Verdict matched_noise() {
  FockTrajectoryOptions o;
  o.integrator = IntegratorConfig{1e-3, 10.0, 1, 100, "euler_maruyama"};
  o.cutoffs = {40, 40};
  // the reference is accepted up to 1e-3 top-level population and the value is reported
  o.leak_tol = 1e-3;
  try {
    const MatchedNoiseReport r = matched_noise_compare(build_benchmark_chain(), o, 0);
    Verdict v;
    v.pass = r.first_order <= 0.05 && r.second_order <= 0.15;
    v.detail = fmt("first-order discrepancy %.4f (<=0.05), second-order %.4f (<=0.15); Fock top-level population %.2e",
                   r.first_order, r.second_order, r.fock_max_top_population);
    return v;
  } catch (const CutoffLeakage& e) {
    return {false, std::string("Fock reference invalid: ") + e.what()};
  }
}

// 3. Classical bistability against the discriminant and root-count oracles.
Verdict bistability() {
  const auto lib = single_node_bistable_interval(-1.0);
  const auto ref = oracles::discriminant_interval(-1.0);
  if (!lib || !ref) return {false, "no bistable interval at D = -1"};
  const double d_int = std::max(std::abs(lib->first - ref->first), std::abs(lib->second - ref->second));
  int mismatch1 = 0, mismatch2 = 0, multi1 = 0, multi2 = 0;
  PhaseDiagramSpec s1;
  s1.values1 = linspace(-3.0, 1.0, 50);
  s1.values2 = linspace(0.05, 1.5, 50);
  for (const auto& c : phase_diagram(s1)) {
    const oracles::Count o = oracles::single_node(c.axis1, c.axis2);
    if (o.n_fp != c.n_fp || o.n_stable != c.n_stable) ++mismatch1;
    if (o.n_stable > 1) ++multi1;
  }
  PhaseDiagramSpec s2;
  s2.axis1 = "g";
  s2.axis2 = "N";
  s2.delta = -1.0;
  s2.values1 = linspace(0.1, 2.0, 50);
  s2.values2 = linspace(0.05, 2.5, 50);
  for (const auto& c : phase_diagram(s2)) {
    const oracles::Count o = oracles::two_node(-1.0, c.axis1, c.axis2, 20000);
    if (o.n_fp != c.n_fp || o.n_stable != c.n_stable) ++mismatch2;
    if (o.n_stable > 1) ++multi2;
  }
  Verdict v;
  v.pass = d_int <= 1e-6 && mismatch1 == 0 && mismatch2 == 0;
  v.detail = fmt("interval (%.6f, %.6f), |lib - oracle| = %.1e; K=1 grid mismatches %d/2500 (%d bistable cells); "
                 "K=2 grid mismatches %d/2500 (%d bistable cells)",
                 lib->first, lib->second, d_int, mismatch1, multi1, mismatch2, multi2);
  return v;
}

// 4. Task I at desk scale.
Verdict task1() {
  Task1Config nl;
  nl.workers = g_workers;
  Task1Config lin = nl;
  lin.spec.qrc.lambda = 0.0;
  const Task1Result a = run_task1(nl);
  const Task1Result b = run_task1(lin);
  const double t_max = a.metrics.argfirst_max >= 0 ? a.times[static_cast<std::size_t>(a.metrics.argfirst_max)] : -1.0;
  double lo = 1.0, hi = 0.0, band_from = -1.0;
  for (std::size_t i = 0; i < b.test_accuracy.size(); ++i) {
    lo = std::min(lo, b.test_accuracy[i]);
    hi = std::max(hi, b.test_accuracy[i]);
  }
  for (std::size_t i = b.test_accuracy.size(); i-- > 0;) {
    if (b.test_accuracy[i] < 0.40 || b.test_accuracy[i] > 0.60) break;
    band_from = b.times[i];
  }
  Verdict v;
  v.pass = a.metrics.c_max >= 0.99 && t_max >= 0.0 && t_max < 10.0 && lo >= 0.40 && hi <= 0.60 &&
           a.failed_trajectories == 0 && b.failed_trajectories == 0;
  v.detail = fmt("nonlinear C_max %.4f at kt %.2f; linear accuracy range [%.4f, %.4f] (need [0.40, 0.60]), "
                 "inside band from kt %.2f; failed trajectories %d/%d",
                 a.metrics.c_max, t_max, lo, hi, band_from, a.failed_trajectories, b.failed_trajectories);
  return v;
}

// 5. Task II at desk scale.
Verdict task2() {
  Task2Config nl;
  nl.workers = g_workers;
  Task2Config lin = nl;
  lin.spec.lambda1 = 0.0;
  const Task2Result a = run_task2(nl);
  const Task2Result b = run_task2(lin);
  const double gap = a.test_accuracy.back() - b.test_accuracy.back();
  std::ostringstream curve;
  for (std::size_t i = 0; i < a.ns_grid.size(); ++i)
    curve << (i ? " " : "") << a.ns_grid[i] << ":" << fmt("%.3f/%.3f", a.test_accuracy[i], b.test_accuracy[i]);
  Verdict v;
  v.pass = a.spearman > 0.9 && gap >= 0.15 && a.failed_trajectories == 0 && b.failed_trajectories == 0;
  v.detail = fmt("spearman %.3f (>0.9), gap at N_S=%d %.3f (>=0.15); ", a.spearman, a.ns_grid.back(), gap) +
             "N_S:nonlinear/linear " + curve.str();
  return v;
}

// 6. B12 trends.
Verdict b12() {
  TaskIISpec lin;
  lin.lambda1 = 0.0;
  const double b_lin = b12_metric(build_task2_chain(lin, 1), build_task2_chain(lin, 2), 2);
  std::vector<std::pair<double, double>> pts;
  for (double ee : {5.0, 12.5, 20.0}) {
    const TaskIISpec s = task2_instance(TaskIISpec{}, ee, 0.354);
    pts.emplace_back(s.lambda1, b12_metric(build_task2_chain(s, 1), build_task2_chain(s, 2), 2));
  }
  std::sort(pts.begin(), pts.end());
  bool increasing = true;
  for (std::size_t i = 1; i < pts.size(); ++i) increasing = increasing && pts[i].second > pts[i - 1].second;
  Verdict v;
  v.pass = b_lin <= 1e-12 && increasing;
  v.detail = fmt("B12(Lambda=0) = %.1e; (Lambda, B12) = (%.6f, %.4f) (%.6f, %.4f) (%.6f, %.4f)", b_lin, pts[0].first,
                 pts[0].second, pts[1].first, pts[1].second, pts[2].first, pts[2].second);
  return v;
}

// 7. Effective-parameter closed forms.
Verdict closed_forms() {
  const TaskIISpec s2;
  const double e1 = eta_eff_task2(s2, 1), e2 = eta_eff_task2(s2, 2);
  double worst = std::max(std::abs(e1 - e2), std::abs(std::abs(e1) - 12.5));
  TaskISpec s1;
  const double etas[3] = {26.0, 15.0, 9.0}, expect[3] = {31.2, 18.0, 10.8};
  for (int i = 0; i < 3; ++i) {
    s1.eta = etas[i];
    worst = std::max(worst, std::abs(std::abs(eta_eff_task1(s1, 3)) - expect[i]));
  }
  const double g_pa = pa_for_unit_gain(1.0);
  const double g_ref = 0.25 * std::sqrt(9.0 - 6.0 * std::sqrt(2.0));
  worst = std::max(worst, std::abs(g_pa - g_ref));
  Verdict v;
  v.pass = worst <= 1e-12;
  v.detail = fmt("Task II eta_eff %.12f / %.12f; G_PA %.15f; max deviation %.1e", e1, e2, g_pa, worst);
  return v;
}

// 8. Property suites.
Verdict property_suite() {
  const double rt = std::max(properties::moment_round_trip_error(1, 1), properties::moment_round_trip_error(2, 2));
  CVec a(2);
  a << cplx(0.8, -1.1), cplx(-0.3, 0.6);
  const double coh = properties::coherent_nullity_error(a);
  const double fixed = properties::conditional_coherent_drift(100000);
  const properties::EnsembleCheck ens = properties::ensemble_vs_unconditional(2000, g_workers);
  const bool soft = properties::softmax_shift_invariant(17);
  const double tie = properties::boundary_tie_error(23);
  const ChainSpec chain = single_kerr_chain(-1.0, 0.05, 2.0, 1.0);
  const IntegratorConfig cfg{1e-3, 5.0, 3, 100, "euler_maruyama"};
  const bool bytes = properties::steo_bytes(chain, cfg, 1) == properties::steo_bytes(chain, cfg, 1);
  Task1Config t1;
  t1.integrator = IntegratorConfig{1e-3, 1.0, 4, 100, "euler_maruyama"};
  t1.q_train = t1.q_test = 2;
  t1.train.max_iter = 100;
  Task1Config t1b = t1;
  t1.workers = 1;
  t1b.workers = 4;
  const Task1Result r1 = run_task1(t1), r2 = run_task1(t1b);
  const bool det = bytes && r1.test_accuracy == r2.test_accuracy && r1.layer.W == r2.layer.W;
  Verdict v;
  v.pass = rt <= 1e-12 && coh <= 1e-12 && fixed <= 1e-12 && ens.max_z <= 3.0 && soft && tie <= 1e-10 && det;
  v.detail = fmt("round trip %.1e; coherent nullity %.1e; conditional fixed point %.1e over 1e5 steps; "
                 "ensemble max |z| %.2f over %zu; softmax shift %s; boundary tie %.1e; determinism %s",
                 rt, coh, fixed, ens.max_z, ens.n_compared, soft ? "ok" : "broken", tie, det ? "ok" : "broken");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrc acceptance suite"};
  std::vector<int> only;
  std::set<int> known_fail;
  std::string report;
  unsigned workers = qrc::default_workers();
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--known-fail", known_fail, "criteria whose FAIL does not change the exit code")->delimiter(',');
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--report", report, "append verdict lines to this file");
  CLI11_PARSE(app, argc, argv);
  g_workers = std::max(1u, workers);

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"steady-state oracle", steady_oracle}, {"matched-noise oracle", matched_noise},
      {"classical bistability", bistability}, {"task I", task1},
      {"task II", task2},                     {"B12 trends", b12},
      {"closed forms", closed_forms},         {"property suites", property_suite}};
  if (only.empty())
    for (int i = 1; i <= 8; ++i) only.push_back(i);

  int unexpected = 0;
  for (int id : only) {
    const auto& [name, fn] = criteria[static_cast<std::size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = !v.pass && known_fail.count(id) > 0;
    std::ostringstream line;
    line << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << (known ? " (known)" : "") << " [" << name
         << "] " << v.detail << " (" << fmt("%.1f", secs) << " s)";
    std::cout << line.str() << std::endl;
    if (!report.empty()) std::ofstream(report, std::ios::app) << line.str() << "\n";
    if (!v.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 4;
}
