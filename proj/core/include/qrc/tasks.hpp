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
#include <string>
#include <vector>

#include "qrc/chains.hpp"
#include "qrc/fock.hpp"
#include "qrc/learn.hpp"

namespace qrc {

unsigned default_workers();

// Runs fn(i) for i in [0, n) on up to `workers` threads.  Work is claimed in
// index order; results must be written to per-index slots.  The first
// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// Trajectory index for class sigma and shot q.
inline std::uint64_t trajectory_id(int sigma, std::uint64_t q) {
  return (static_cast<std::uint64_t>(sigma - 1) << 32) + q;
}

// Single driven Kerr node with one monitored loss channel.
ChainSpec single_kerr_chain(double delta, double lambda, cplx eta, double gamma, bool monitored = true);
// Real drive giving N = (eta/gamma) sqrt(Lambda/gamma).
double drive_for_n(double N, double lambda, double gamma);

struct KerrOraclePoint {
  double lambda_ratio = 0.0, N = 0.0;
  double mean_teom = 0.0, mean_exact = 0.0;  // |<b>|
  double nb_teom = 0.0, nb_exact = 0.0;      // C_{b^dag b}
  double cbb_teom = 0.0, cbb_exact = 0.0;    // |C_bb|
  double err_mean = 0.0, err_nb = 0.0, err_cbb = 0.0;
  double max_err() const;
};

struct KerrOracleReport {
  std::vector<KerrOraclePoint> points;
  double max_err(double lambda_ratio) const;
  std::string to_json() const;
};

// TEOM steady state of the single Kerr node against the exact complex-P
// moments, over a grid of N for each Lambda/gamma.
KerrOracleReport kerr_steady_oracle(double delta, const std::vector<double>& lambda_ratios,
                                    const std::vector<double>& N_grid, double gamma = 1.0, unsigned workers = 1);

struct MatchedNoiseReport {
  std::vector<double> times;
  std::vector<CumulantState> teom, fock;
  // sum_t |x_S - x_F| / sum_t |x_F|, stacked over all modes / entries
  double first_order = 0.0;
  double second_order = 0.0;
  double fock_max_top_population = 0.0;
  std::string to_json() const;
};

// Conditional STEOM and Fock SME driven by identical noise increments.
MatchedNoiseReport matched_noise_compare(const ChainSpec& chain, const FockTrajectoryOptions& opts,
                                         std::uint64_t traj);
MatchedNoiseReport matched_noise_discrepancy(const std::vector<double>& times, std::vector<CumulantState> teom,
                                             std::vector<CumulantState> fock);

// Pointer-state task: accuracy versus time with time-independent weights.
struct Task1Config {
  TaskISpec spec;
  IntegratorConfig integrator{1e-3, 10.0, 1, 100, "euler_maruyama"};
  int q_train = 100, q_test = 200;
  // zero biases: the task is symmetric under I -> -I
  TrainOptions train{5000, 1e-8, true, 64, 2, 300, false};
  unsigned workers = 1;

  void validate() const;
};

struct Task1Result {
  std::vector<double> times;
  std::vector<double> test_accuracy;
  ClassificationMetrics metrics;
  OutputLayer layer;
  Dataset train_set, test_set;
  QRCNodes nodes;
  int failed_trajectories = 0;
  std::string failure_summary;
};

Task1Result run_task1(const Task1Config& cfg);

// Amplifier-state task: accuracy versus shots per sample at t_f.
struct Task2Config {
  TaskIISpec spec;
  double dt = 1e-2, t0 = 35.0, t_final = 120.0;
  std::uint64_t seed = 1;
  int q_train = 200, q_test = 400;
  std::vector<int> ns_grid{1, 2, 5, 10, 20, 30, 40, 50};
  bool bootstrap = false;
  TrainOptions train{5000, 1e-8, false, 64, 2, 300};
  unsigned workers = 1;

  int ns_max() const;
  void validate() const;
};

struct Task2Result {
  std::vector<int> ns_grid;
  std::vector<double> test_accuracy;
  ClassificationMetrics metrics;
  double spearman = 0.0;
  std::size_t pool_per_class = 0;
  int failed_trajectories = 0;
  std::string failure_summary;
  // per class, interleaved (I^X, I^P) at t_f for every shot in the pool
  std::vector<std::vector<double>> pool;
  std::vector<Dataset> train_sets, test_sets;
};

Task2Result run_task2(const Task2Config& cfg);

// Measured quadratures (I^X, I^P) at t_f for one shot, filtered from t0.
std::vector<double> final_quadratures(const Model& model, const IntegratorConfig& integ, double t0,
                                      std::uint64_t traj);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qrc
