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
#include <iosfwd>
#include <string>
#include <vector>

#include "qrc/sde.hpp"

namespace qrc {

// Boxcar-filtered quadratures, sampled on the stored record grid.
struct QuadratureSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> ix, ip;  // [channel][time]

  std::size_t n_channels() const { return ix.size(); }
  std::size_t size() const { return times.size(); }
  // (I_0^X, I_0^P, I_1^X, ...) at time index i.
  RVec features(std::size_t i) const;
};

// I(t) = 1/(t - t0) * integral_{t0}^{t} J.  Only grid times t > t0 are kept.
QuadratureSeries boxcar_filter(const HeterodyneRecord& record, double t0 = 0.0);
QuadratureSeries ensemble_average(const std::vector<QuadratureSeries>& shots);

// y_k = cos(phi_k) x_{2k} + sin(phi_k) x_{2k+1}
RVec project_phi(const RVec& x, const std::vector<double>& phi);

// Disjoint groups of n_shots indices out of a pool of size pool (leftovers dropped).
std::vector<std::vector<std::size_t>> partition_pool(std::size_t pool, std::size_t n_shots);
std::vector<std::vector<std::size_t>> bootstrap_pool(std::size_t pool, std::size_t n_shots, std::size_t n_groups,
                                                     std::uint64_t seed);

// Columns of X are samples; labels are 1..C.
struct Dataset {
  RMat X;
  std::vector<int> labels;
  std::vector<int> q;
  std::vector<double> t;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

struct OutputLayer {
  RMat W;  // C x D (D = projected dimension when phi is set)
  RVec b;
  std::vector<double> phi;  // empty: no projection
  bool converged = false;
  int iterations = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::string kind = "trained";
  std::vector<double> loss_history;  // not serialized

  int n_classes() const { return static_cast<int>(W.rows()); }
};

struct TrainOptions {
  int max_iter = 5000;
  double grad_tol = 1e-8;
  bool train_phi = false;
  int phi_grid = 64;
  int phi_sweeps = 2;
  int phi_inner_iter = 300;
  bool fit_bias = true;  // false: b fixed at zero
};

RVec softmax(const RVec& z);
OutputLayer train(const Dataset& data, const TrainOptions& opts = {});
// Loss ||Y - S[WX + b]||^2 / n for a fixed layer.
double training_loss(const OutputLayer& layer, const Dataset& data);
int predict(const OutputLayer& layer, const RVec& x);
RVec scores(const OutputLayer& layer, const RVec& x);
double accuracy(const OutputLayer& layer, const Dataset& data);

// (b_i - b_j) + sum_k (W_ik - W_jk) x_k = 0, in the (projected) feature space.
struct Hyperplane {
  RVec normal;
  double offset = 0.0;
  bool degenerate = false;
};
Hyperplane decision_boundary(const OutputLayer& layer, int i, int j);

struct ClassificationMetrics {
  std::vector<double> curve;
  double c_max = 0.0;
  int argfirst_max = -1;
  int index_at_threshold = -1;  // argfirst_max if c_max >= threshold, else -1
  double threshold = 0.99;
};
ClassificationMetrics metrics(const std::vector<double>& curve, double threshold = 0.99, double tie_tol = 1e-9);

// Nearest-class-mean classifier (perpendicular bisectors for two classes).
OutputLayer train_on_means_baseline(const Dataset& data);

// |<b>^{(1)} - <b>^{(2)}| of unconditional steady states for the given mode.
double b12_metric(const ChainSpec& chain1, const ChainSpec& chain2, std::size_t mode);

void write_dataset_csv(std::ostream& os, const Dataset& d);
Dataset read_dataset_csv(std::istream& is);
std::string layer_to_json(const OutputLayer& layer, const std::string& metadata_json = "{}");
OutputLayer layer_from_json(const std::string& s);

}  // namespace qrc
