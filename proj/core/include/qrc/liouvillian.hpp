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

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qrc/state.hpp"

namespace qrc {

// H = -delta b^dag b
struct Detuning {
  std::size_t mode;
  double delta;
};
// H = -(lambda/2) b^dag b^dag b b
struct Kerr {
  std::size_t mode;
  double lambda;
};
// H = eta b^dag + conj(eta) b
struct CoherentDrive {
  std::size_t mode;
  cplx eta;
};
// H = g (b_i b_j^dag + b_i^dag b_j)
struct BeamSplitter {
  std::size_t i, j;
  double g;
};
// H = (G/2) e^{i phase} b b + h.c.
struct DegenerateParametric {
  std::size_t mode;
  double G;
  double phase;
};
// H = G e^{i phase} b_i b_j + h.c.
struct NonDegenerateParametric {
  std::size_t i, j;
  double G;
  double phase;
};
// gamma D[b]; monitored losses are heterodyne-detected.
struct Loss {
  std::size_t mode;
  double gamma;
  bool monitored = false;
};
// H = -g_c P_to X_from,  plus Gamma_c D[X_from + i P_to]
struct DirectionalAmpCoupling {
  std::size_t from, to;
  double g_c, Gamma_c;
};
// H = (i g_c / 2) a_from^dag b_to + h.c.,  plus Gamma_c D[a_from + b_to]
struct CirculatorCoupling {
  std::size_t from, to;
  double g_c, Gamma_c;
};

using Block = std::variant<Detuning, Kerr, CoherentDrive, BeamSplitter, DegenerateParametric,
                           NonDegenerateParametric, Loss, DirectionalAmpCoupling, CirculatorCoupling>;

std::string block_name(const Block& b);

struct Channel {
  std::size_t mode;
  double gamma;
};

struct ChainSpec {
  ModeNetwork network;
  std::vector<Block> blocks;
  std::vector<Channel> channels;  // fixed order defines dW indexing

  // Appends a Loss block; monitored ones also get a channel.
  void add_loss(std::size_t mode, double gamma, bool monitored);
  void validate() const;
  bool has_kerr() const;
};

// Quadratic part of the adjoint Liouvillian on xi = (b, b^dag):
//   d<xi>/dt = M <xi> + c,
//   dC/dt    = M C + C M^T + S
// with C the doubled normal-ordered cumulant matrix.  S contains the
// normal-ordering constants generated by the blocks.
struct LinearGenerator {
  CMat M;
  CVec c;
  CMat S;
};

LinearGenerator build_linear_generator(const ChainSpec& chain);

struct DriftOptions {
  // false drops the cumulant terms from the Kerr mean drift (classical mode)
  bool cumulant_feedback = true;
};

// Compiled chain.  All drift evaluations are pure functions of the state.
class Model {
 public:
  explicit Model(ChainSpec chain, DriftOptions opts = {});

  const ChainSpec& chain() const { return chain_; }
  const LinearGenerator& generator() const { return gen_; }
  const DriftOptions& options() const { return opts_; }
  std::size_t n_modes() const { return n_; }
  std::size_t n_channels() const { return chain_.channels.size(); }

  // Deterministic drift in the doubled basis.  dm has length 2N;
  // dc receives the first N columns of dC/dt (rows 0..2N-1).
  void drift_doubled(const CVec& m, const CMat& c, CVec& dm, CMat& dc) const;
  // Adds the conditioning term -sum_k gamma_k (u v^T + v u^T) to dc.
  void add_backaction_doubled(const CMat& c, CMat& dc) const;
  // Coefficients of dW^X, dW^P in dm (first N entries), per channel.
  void innovation_doubled(const CMat& c, std::size_t channel, CVec& xi_x, CVec& xi_p) const;

  struct KerrTerm {
    std::size_t mode;
    double lambda;
  };
  const std::vector<KerrTerm>& kerr_terms() const { return kerr_; }

 private:
  ChainSpec chain_;
  DriftOptions opts_;
  std::size_t n_;
  LinearGenerator gen_;
  std::vector<KerrTerm> kerr_;
  struct Entry {
    Eigen::Index i, j;
    cplx v;
  };
  std::vector<Entry> m_nz_;
};

CVec mean_drift(const CumulantState& s, const ChainSpec& chain, DriftOptions opts = {});
std::pair<CMat, CMat> cumulant_drift(const CumulantState& s, const ChainSpec& chain);
std::pair<CMat, CMat> measurement_backaction(const CumulantState& s, const ChainSpec& chain);
std::vector<std::pair<CVec, CVec>> innovation_coefficients(const CumulantState& s,
                                                           const ChainSpec& chain);
// Per channel: (sqrt(gamma/2) <b + b^dag>, sqrt(gamma/2) <-i b + i b^dag>).
std::vector<std::pair<double, double>> heterodyne_current_means(const CumulantState& s,
                                                                const ChainSpec& chain);

}  // namespace qrc
