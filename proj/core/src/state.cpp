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

#include "qrc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qrc {

ModeNetwork::ModeNetwork(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("ModeNetwork needs at least one mode");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw std::invalid_argument("ModeNetwork labels must be unique");
}

ModeNetwork ModeNetwork::anonymous(std::size_t n) {
  std::vector<std::string> l;
  for (std::size_t k = 0; k < n; ++k) l.push_back("m" + std::to_string(k));
  return ModeNetwork(l);
}

std::size_t ModeNetwork::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown mode label: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

bool CumulantState::all_finite() const {
  return mu.allFinite() && c_bb.allFinite() && c_bdb.allFinite();
}

double CumulantState::structure_defect() const {
  double d = (c_bb - c_bb.transpose()).cwiseAbs().maxCoeff();
  d = std::max(d, (c_bdb - c_bdb.adjoint()).cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < c_bdb.rows(); ++i) d = std::max(d, std::abs(c_bdb(i, i).imag()));
  return d;
}

bool CumulantState::physical(double eps) const {
  for (Eigen::Index i = 0; i < c_bdb.rows(); ++i)
    if (c_bdb(i, i).real() < -eps) return false;
  return true;
}

CumulantState vacuum(std::size_t n) {
  CumulantState s;
  s.mu = CVec::Zero(n);
  s.c_bb = CMat::Zero(n, n);
  s.c_bdb = CMat::Zero(n, n);
  return s;
}

CumulantState vacuum(const ModeNetwork& network) { return vacuum(network.size()); }

CumulantState coherent_state(const ModeNetwork& network, const CVec& alphas) {
  if (static_cast<std::size_t>(alphas.size()) != network.size())
    throw std::invalid_argument("coherent_state: amplitude count does not match network");
  CumulantState s = vacuum(network);
  s.mu = alphas;
  return s;
}

CVec doubled_mean(const CumulantState& s) {
  const Eigen::Index n = s.mu.size();
  CVec m(2 * n);
  m.head(n) = s.mu;
  m.tail(n) = s.mu.conjugate();
  return m;
}

CMat doubled_cumulants(const CumulantState& s) {
  const Eigen::Index n = s.mu.size();
  CMat c(2 * n, 2 * n);
  c.topLeftCorner(n, n) = s.c_bb;
  c.topRightCorner(n, n) = s.c_bdb.transpose();
  c.bottomLeftCorner(n, n) = s.c_bdb;
  c.bottomRightCorner(n, n) = s.c_bb.conjugate();
  return c;
}

CumulantState from_doubled(const CVec& m, const CMat& c) {
  const Eigen::Index n = m.size() / 2;
  CumulantState s;
  s.mu = m.head(n);
  s.c_bb = c.topLeftCorner(n, n);
  s.c_bdb = c.bottomLeftCorner(n, n);
  return s;
}

MomentIndex::MomentIndex(std::vector<int> p, std::vector<int> q)
    : dagger_powers(std::move(p)), plain_powers(std::move(q)) {
  if (dagger_powers.size() != plain_powers.size())
    throw std::invalid_argument("MomentIndex: power vectors differ in length");
  for (std::size_t k = 0; k < dagger_powers.size(); ++k)
    if (dagger_powers[k] < 0 || plain_powers[k] < 0)
      throw std::invalid_argument("MomentIndex: negative power");
}

MomentIndex MomentIndex::single(int p, int q) { return MomentIndex({p}, {q}); }

int MomentIndex::order() const {
  return std::accumulate(dagger_powers.begin(), dagger_powers.end(), 0) +
         std::accumulate(plain_powers.begin(), plain_powers.end(), 0);
}

bool MomentIndex::operator<(const MomentIndex& o) const {
  if (order() != o.order()) return order() < o.order();
  if (dagger_powers != o.dagger_powers) return dagger_powers < o.dagger_powers;
  return plain_powers < o.plain_powers;
}

bool MomentIndex::operator==(const MomentIndex& o) const {
  return dagger_powers == o.dagger_powers && plain_powers == o.plain_powers;
}

namespace {

// Letter k < N is b_k^dag, letter N + k is b_k.
std::vector<int> letters_of(const MomentIndex& idx) {
  const int n = static_cast<int>(idx.dagger_powers.size());
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < idx.dagger_powers[k]; ++r) out.push_back(k);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < idx.plain_powers[k]; ++r) out.push_back(n + k);
  return out;
}

MomentIndex index_of_letters(const std::vector<int>& letters, int n) {
  std::vector<int> p(n, 0), q(n, 0);
  for (int l : letters) {
    if (l < n) ++p[l];
    else ++q[l - n];
  }
  return MomentIndex(p, q);
}

void partitions_rec(int i, int n, std::vector<std::vector<int>>& cur,
                    std::vector<std::vector<std::vector<int>>>& out) {
  if (i == n) {
    out.push_back(cur);
    return;
  }
  for (std::size_t b = 0; b < cur.size(); ++b) {
    cur[b].push_back(i);
    partitions_rec(i + 1, n, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({i});
  partitions_rec(i + 1, n, cur, out);
  cur.pop_back();
}

const std::vector<std::vector<std::vector<int>>>& set_partitions(int n) {
  static std::vector<std::vector<std::vector<std::vector<int>>>> cache = [] {
    std::vector<std::vector<std::vector<std::vector<int>>>> c(kMaxConversionOrder + 1);
    for (int m = 0; m <= kMaxConversionOrder; ++m) {
      std::vector<std::vector<int>> cur;
      partitions_rec(0, m, cur, c[m]);
    }
    return c;
  }();
  return cache.at(n);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

cplx lookup(const MomentMap& m, const MomentIndex& idx, const char* what) {
  auto it = m.find(idx);
  if (it == m.end()) throw std::invalid_argument(std::string("missing lower-order ") + what);
  return it->second;
}

// mode: +1 gives moments -> cumulants, -1 gives the inverse.
MomentMap convert(const MomentMap& in, bool to_cumulants) {
  MomentMap out;
  for (const auto& [idx, value] : in) {
    const int ord = idx.order();
    if (ord > kMaxConversionOrder) throw std::invalid_argument("conversion order above 4");
    if (ord == 0) continue;
    const int n = static_cast<int>(idx.dagger_powers.size());
    const auto letters = letters_of(idx);
    cplx acc = 0.0;
    for (const auto& part : set_partitions(ord)) {
      cplx prod = 1.0;
      for (const auto& block : part) {
        std::vector<int> sub;
        for (int pos : block) sub.push_back(letters[pos]);
        prod *= lookup(in, index_of_letters(sub, n), to_cumulants ? "moment" : "cumulant");
      }
      const int nb = static_cast<int>(part.size());
      const double w = to_cumulants ? ((nb % 2 == 1) ? 1.0 : -1.0) * factorial(nb - 1) : 1.0;
      acc += w * prod;
    }
    out[idx] = acc;
  }
  return out;
}

}  // namespace

MomentMap moments_to_cumulants(const MomentMap& moments) { return convert(moments, true); }

MomentMap cumulants_to_moments(const MomentMap& cumulants) { return convert(cumulants, false); }

std::vector<MomentIndex> all_indices(std::size_t n_modes, int max_order) {
  if (max_order > kMaxConversionOrder) throw std::invalid_argument("conversion order above 4");
  const int n = static_cast<int>(n_modes);
  std::vector<MomentIndex> out;
  std::vector<int> powers(2 * n, 0);
  // Odometer over all power vectors with total <= max_order.
  while (true) {
    int tot = std::accumulate(powers.begin(), powers.end(), 0);
    if (tot >= 1 && tot <= max_order)
      out.emplace_back(std::vector<int>(powers.begin(), powers.begin() + n),
                       std::vector<int>(powers.begin() + n, powers.end()));
    int pos = 0;
    while (pos < 2 * n) {
      ++powers[pos];
      if (std::accumulate(powers.begin(), powers.end(), 0) <= max_order) break;
      powers[pos] = 0;
      ++pos;
    }
    if (pos == 2 * n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

MomentMap cumulant_map(const CumulantState& s, int max_order) {
  const std::size_t n = s.n_modes();
  MomentMap out;
  for (const auto& idx : all_indices(n, max_order)) {
    const auto letters = letters_of(idx);
    cplx v = 0.0;
    const int nn = static_cast<int>(n);
    if (letters.size() == 1) {
      const int l = letters[0];
      v = l < nn ? std::conj(s.mu[l]) : s.mu[l - nn];
    } else if (letters.size() == 2) {
      const int a = letters[0], b = letters[1];
      if (a < nn && b < nn) v = std::conj(s.c_bb(a, b));
      else if (a < nn) v = s.c_bdb(a, b - nn);
      else v = s.c_bb(a - nn, b - nn);
    }
    out[idx] = v;
  }
  return out;
}

QuadratureStats quadrature_stats(const CumulantState& s, std::size_t mode) {
  if (mode >= s.n_modes()) throw std::out_of_range("quadrature_stats: bad mode index");
  QuadratureStats q;
  const cplx m = s.mu[mode];
  const double n = s.c_bdb(mode, mode).real();
  const cplx sq = s.c_bb(mode, mode);
  q.mean_x = std::sqrt(2.0) * m.real();
  q.mean_p = std::sqrt(2.0) * m.imag();
  q.var_max = 0.5 + n + std::abs(sq);
  q.var_min = 0.5 + n - std::abs(sq);
  q.squeeze_angle = std::abs(sq) > 0.0 ? std::arg(sq) / 2.0 : 0.0;
  return q;
}

std::size_t flat_size(std::size_t n) { return 2 * n * n + 3 * n; }

std::vector<double> serialize(const CumulantState& s) {
  const std::size_t n = s.n_modes();
  std::vector<double> out;
  out.reserve(flat_size(n));
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.mu[i].real());
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.mu[i].imag());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      out.push_back(s.c_bb(i, j).real());
      out.push_back(s.c_bb(i, j).imag());
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      out.push_back(s.c_bdb(i, j).real());
      if (j != i) out.push_back(s.c_bdb(i, j).imag());
    }
  return out;
}

CumulantState deserialize(const std::vector<double>& flat, std::size_t n) {
  if (flat.size() != flat_size(n)) throw std::invalid_argument("deserialize: wrong record length");
  CumulantState s = vacuum(n);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) s.mu[i] = cplx(flat[p + i], flat[p + n + i]);
  p += 2 * n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      s.c_bb(i, j) = s.c_bb(j, i) = cplx(flat[p], flat[p + 1]);
      p += 2;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (j == i) {
        s.c_bdb(i, i) = flat[p++];
      } else {
        s.c_bdb(i, j) = cplx(flat[p], flat[p + 1]);
        s.c_bdb(j, i) = std::conj(s.c_bdb(i, j));
        p += 2;
      }
    }
  return s;
}

}  // namespace qrc
