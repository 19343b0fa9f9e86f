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

#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Tolerance for the physicality check diag(c_bdb) >= -eps.
inline constexpr double kEpsPhys = 1e-9;

class ModeNetwork {
 public:
  ModeNetwork() = default;
  explicit ModeNetwork(std::vector<std::string> labels);
  static ModeNetwork anonymous(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t k) const { return labels_.at(k); }
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
};

// Means plus second-order normal-ordered cumulants:
//   mu[i]       = <b_i>
//   c_bb(i,j)   = C_{b_i b_j}     (symmetric)
//   c_bdb(i,j)  = C_{b_i^dag b_j} (Hermitian)
struct CumulantState {
  CVec mu;
  CMat c_bb;
  CMat c_bdb;

  std::size_t n_modes() const { return static_cast<std::size_t>(mu.size()); }
  bool all_finite() const;
  // Largest violation of symmetry / Hermiticity / real diagonal.
  double structure_defect() const;
  // diag(c_bdb) >= -eps for every mode.
  bool physical(double eps = kEpsPhys) const;
};

CumulantState vacuum(const ModeNetwork& network);
CumulantState vacuum(std::size_t n_modes);
CumulantState coherent_state(const ModeNetwork& network, const CVec& alphas);

// Doubled basis xi = (b_1..b_N, b_1^dag..b_N^dag).  The 2N x 2N normal-ordered
// cumulant matrix is [[c_bb, c_bdb^T], [c_bdb, conj(c_bb)]] and is symmetric.
CVec doubled_mean(const CumulantState& s);
CMat doubled_cumulants(const CumulantState& s);
CumulantState from_doubled(const CVec& m, const CMat& c);

// Normal-ordered moment label b_1^dag^p_1 ... b_N^dag^p_N b_1^q_1 ... b_N^q_N.
struct MomentIndex {
  std::vector<int> dagger_powers;
  std::vector<int> plain_powers;

  MomentIndex() = default;
  MomentIndex(std::vector<int> p, std::vector<int> q);
  static MomentIndex single(int p, int q);  // one-mode shorthand

  int order() const;
  bool operator<(const MomentIndex& o) const;
  bool operator==(const MomentIndex& o) const;
};

using MomentMap = std::map<MomentIndex, cplx>;

inline constexpr int kMaxConversionOrder = 4;

MomentMap moments_to_cumulants(const MomentMap& moments);
MomentMap cumulants_to_moments(const MomentMap& cumulants);

// All indices with 1 <= order <= max_order for n modes.
std::vector<MomentIndex> all_indices(std::size_t n_modes, int max_order);

// Cumulant map of a CumulantState (orders 1 and 2; higher orders are zero).
MomentMap cumulant_map(const CumulantState& s, int max_order = 2);

struct QuadratureStats {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_max = 0.5;
  double var_min = 0.5;
  double squeeze_angle = 0.0;
};

QuadratureStats quadrature_stats(const CumulantState& s, std::size_t mode);

// Flat record: [Re mu | Im mu | (Re,Im) of c_bb upper triangle, row-major |
// c_bdb upper triangle, row-major, diagonal as one real, off-diagonal as
// (Re,Im)].  Length 2N^2 + 3N.
std::vector<double> serialize(const CumulantState& s);
CumulantState deserialize(const std::vector<double>& flat, std::size_t n_modes);
std::size_t flat_size(std::size_t n_modes);

}  // namespace qrc
