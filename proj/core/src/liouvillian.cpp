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

#include "qrc/liouvillian.hpp"

#include <cmath>
#include <sstream>

namespace qrc {

namespace {

const cplx I(0.0, 1.0);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_mode(std::size_t k, std::size_t n, const char* what) {
  if (k >= n) {
    std::ostringstream os;
    os << what << ": mode index " << k << " out of range for " << n << " modes";
    throw std::invalid_argument(os.str());
  }
}

void check_rate(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string(what) + ": rate must be >= 0");
}

// Builder for the quadratic generator in the doubled basis.
class GeneratorBuilder {
 public:
  explicit GeneratorBuilder(std::size_t n) : n_(n), H_(CMat::Zero(2 * n, 2 * n)), f_(CVec::Zero(2 * n)) {
    const Eigen::Index d = static_cast<Eigen::Index>(2 * n);
    Omega_ = CMat::Zero(d, d);
    K_ = CMat::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      Omega_(i, n + i) = 1.0;
      Omega_(n + i, i) = -1.0;
      K_(i, n + i) = 1.0;
    }
    Md_ = CMat::Zero(d, d);
    Q_ = CMat::Zero(d, d);
  }

  std::size_t bar(std::size_t p) const { return p < n_ ? p + n_ : p - n_; }

  // Hamiltonian term coeff * xi_p xi_q.  Hermitian conjugates are added by the caller.
  void quad(std::size_t p, std::size_t q, cplx coeff) {
    H_(p, q) += coeff;
    H_(q, p) += coeff;
  }
  void lin(std::size_t p, cplx coeff) { f_(p) += coeff; }

  // Dissipator D[L] with L = sum_p l_p xi_p.
  void dissipator(const CVec& l) {
    CVec lam = CVec::Zero(l.size());
    for (Eigen::Index p = 0; p < l.size(); ++p) lam(bar(p)) = std::conj(l(p));
    const CVec Ol = Omega_ * l;
    const CVec Otlam = Omega_.transpose() * lam;
    Md_ += 0.5 * (Ol * lam.transpose() + Otlam * l.transpose());
    Q_ += Otlam * Ol.transpose();
  }

  LinearGenerator finish() const {
    LinearGenerator g;
    g.M = I * Omega_.transpose() * H_ + Md_;
    g.c = I * Omega_.transpose() * f_;
    g.S = g.M * K_ + K_ * g.M.transpose() + Q_;
    return g;
  }

  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  CMat H_;
  CVec f_;
  CMat Omega_, K_, Md_, Q_;
};

}  // namespace

std::string block_name(const Block& b) {
  return std::visit(overloaded{[](const Detuning&) { return std::string("Detuning"); },
                               [](const Kerr&) { return std::string("Kerr"); },
                               [](const CoherentDrive&) { return std::string("CoherentDrive"); },
                               [](const BeamSplitter&) { return std::string("BeamSplitter"); },
                               [](const DegenerateParametric&) { return std::string("DegenerateParametric"); },
                               [](const NonDegenerateParametric&) { return std::string("NonDegenerateParametric"); },
                               [](const Loss&) { return std::string("Loss"); },
                               [](const DirectionalAmpCoupling&) { return std::string("DirectionalAmpCoupling"); },
                               [](const CirculatorCoupling&) { return std::string("CirculatorCoupling"); }},
                    b);
}

void ChainSpec::add_loss(std::size_t mode, double gamma, bool monitored) {
  blocks.push_back(Loss{mode, gamma, monitored});
  if (monitored) channels.push_back({mode, gamma});
}

void ChainSpec::validate() const {
  const std::size_t n = network.size();
  if (n == 0) throw std::invalid_argument("ChainSpec: empty network");
  for (const auto& b : blocks) {
    std::visit(overloaded{[&](const Detuning& x) { check_mode(x.mode, n, "Detuning"); },
                          [&](const Kerr& x) { check_mode(x.mode, n, "Kerr"); },
                          [&](const CoherentDrive& x) { check_mode(x.mode, n, "CoherentDrive"); },
                          [&](const BeamSplitter& x) {
                            check_mode(x.i, n, "BeamSplitter");
                            check_mode(x.j, n, "BeamSplitter");
                            if (x.i == x.j) throw std::invalid_argument("BeamSplitter: i == j");
                          },
                          [&](const DegenerateParametric& x) { check_mode(x.mode, n, "DegenerateParametric"); },
                          [&](const NonDegenerateParametric& x) {
                            check_mode(x.i, n, "NonDegenerateParametric");
                            check_mode(x.j, n, "NonDegenerateParametric");
                            if (x.i == x.j) throw std::invalid_argument("NonDegenerateParametric: i == j");
                          },
                          [&](const Loss& x) {
                            check_mode(x.mode, n, "Loss");
                            check_rate(x.gamma, "Loss");
                          },
                          [&](const DirectionalAmpCoupling& x) {
                            check_mode(x.from, n, "DirectionalAmpCoupling");
                            check_mode(x.to, n, "DirectionalAmpCoupling");
                            check_rate(x.Gamma_c, "DirectionalAmpCoupling");
                            if (x.from == x.to) throw std::invalid_argument("DirectionalAmpCoupling: from == to");
                          },
                          [&](const CirculatorCoupling& x) {
                            check_mode(x.from, n, "CirculatorCoupling");
                            check_mode(x.to, n, "CirculatorCoupling");
                            check_rate(x.Gamma_c, "CirculatorCoupling");
                            if (x.from == x.to) throw std::invalid_argument("CirculatorCoupling: from == to");
                          }},
               b);
  }
  for (const auto& ch : channels) {
    check_mode(ch.mode, n, "channel");
    bool found = false;
    for (const auto& b : blocks)
      if (const auto* l = std::get_if<Loss>(&b))
        if (l->monitored && l->mode == ch.mode && l->gamma == ch.gamma) found = true;
    if (!found) throw std::invalid_argument("channel does not refer to a monitored Loss block");
  }
}

bool ChainSpec::has_kerr() const {
  for (const auto& b : blocks)
    if (const auto* k = std::get_if<Kerr>(&b))
      if (k->lambda != 0.0) return true;
  return false;
}

LinearGenerator build_linear_generator(const ChainSpec& chain) {
  const std::size_t n = chain.network.size();
  GeneratorBuilder gb(n);
  const double r2 = std::sqrt(2.0);
  for (const auto& blk : chain.blocks) {
    std::visit(overloaded{
                   [&](const Detuning& x) { gb.quad(n + x.mode, x.mode, -x.delta); },
                   [&](const Kerr&) {},
                   [&](const CoherentDrive& x) {
                     gb.lin(n + x.mode, x.eta);
                     gb.lin(x.mode, std::conj(x.eta));
                   },
                   [&](const BeamSplitter& x) {
                     gb.quad(x.i, n + x.j, x.g);
                     gb.quad(n + x.i, x.j, x.g);
                   },
                   [&](const DegenerateParametric& x) {
                     const cplx e = 0.5 * x.G * std::exp(I * x.phase);
                     gb.quad(x.mode, x.mode, e);
                     gb.quad(n + x.mode, n + x.mode, std::conj(e));
                   },
                   [&](const NonDegenerateParametric& x) {
                     const cplx e = x.G * std::exp(I * x.phase);
                     gb.quad(x.i, x.j, e);
                     gb.quad(n + x.i, n + x.j, std::conj(e));
                   },
                   [&](const Loss& x) {
                     CVec l = CVec::Zero(2 * n);
                     l(x.mode) = std::sqrt(x.gamma);
                     gb.dissipator(l);
                   },
                   [&](const DirectionalAmpCoupling& x) {
                     // X_from = (a + a^dag)/sqrt2,  P_to = (-i b + i b^dag)/sqrt2
                     CVec u = CVec::Zero(2 * n), v = CVec::Zero(2 * n);
                     u(x.to) = -I / r2;
                     u(n + x.to) = I / r2;
                     v(x.from) = 1.0 / r2;
                     v(n + x.from) = 1.0 / r2;
                     for (Eigen::Index p = 0; p < u.size(); ++p)
                       for (Eigen::Index q = 0; q < v.size(); ++q)
                         if (u(p) != 0.0 && v(q) != 0.0) gb.quad(p, q, -x.g_c * u(p) * v(q));
                     CVec l = CVec::Zero(2 * n);
                     const double s = std::sqrt(x.Gamma_c);
                     l(x.from) += s / r2;
                     l(n + x.from) += s / r2;
                     l(x.to) += s / r2;
                     l(n + x.to) -= s / r2;
                     gb.dissipator(l);
                   },
                   [&](const CirculatorCoupling& x) {
                     gb.quad(n + x.from, x.to, 0.5 * I * x.g_c);
                     gb.quad(n + x.to, x.from, -0.5 * I * x.g_c);
                     CVec l = CVec::Zero(2 * n);
                     l(x.from) = std::sqrt(x.Gamma_c);
                     l(x.to) = std::sqrt(x.Gamma_c);
                     gb.dissipator(l);
                   }},
               blk);
  }
  return gb.finish();
}

Model::Model(ChainSpec chain, DriftOptions opts) : chain_(std::move(chain)), opts_(opts) {
  chain_.validate();
  n_ = chain_.network.size();
  gen_ = build_linear_generator(chain_);
  for (const auto& b : chain_.blocks)
    if (const auto* k = std::get_if<Kerr>(&b))
      if (k->lambda != 0.0) kerr_.push_back({k->mode, k->lambda});
  for (Eigen::Index i = 0; i < gen_.M.rows(); ++i)
    for (Eigen::Index j = 0; j < gen_.M.cols(); ++j)
      if (gen_.M(i, j) != 0.0) m_nz_.push_back({i, j, gen_.M(i, j)});
}

void Model::drift_doubled(const CVec& m, const CMat& c, CVec& dm, CMat& dc) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  // M m + c and M C + C M^T, over the nonzeros of M
  dm = gen_.c;
  dc = gen_.S.leftCols(n);
  const Eigen::Index n2 = 2 * n;
  for (const auto& e : m_nz_) {
    dm(e.i) += e.v * m(e.j);
    for (Eigen::Index q = 0; q < n; ++q) dc(e.i, q) += e.v * c(e.j, q);
    if (e.i < n)
      for (Eigen::Index p = 0; p < n2; ++p) dc(p, e.i) += c(p, e.j) * e.v;
  }
  if (kerr_.empty()) return;

  // Gaussian (truncated) ordered moments of ladder operators.
  auto S = [&](Eigen::Index p, Eigen::Index q) -> cplx {
    return c(p, q) + ((p < n && q == p + n) ? cplx(1.0) : cplx(0.0));
  };
  auto mom2 = [&](Eigen::Index p, Eigen::Index q) -> cplx { return m(p) * m(q) + S(p, q); };
  auto mom3 = [&](Eigen::Index a, Eigen::Index b, Eigen::Index d) -> cplx {
    return m(a) * m(b) * m(d) + S(a, b) * m(d) + S(a, d) * m(b) + S(b, d) * m(a);
  };
  // Cov(A1 A2 A3, X) and Cov(X, A1 A2 A3) with operator order kept.
  auto cov31 = [&](const Eigen::Index* o, Eigen::Index x) -> cplx {
    return S(o[0], x) * mom2(o[1], o[2]) + S(o[1], x) * mom2(o[0], o[2]) + S(o[2], x) * mom2(o[0], o[1]);
  };
  auto cov13 = [&](Eigen::Index x, const Eigen::Index* o) -> cplx {
    return S(x, o[0]) * mom2(o[1], o[2]) + S(x, o[1]) * mom2(o[0], o[2]) + S(x, o[2]) * mom2(o[0], o[1]);
  };

  for (const auto& kt : kerr_) {
    const Eigen::Index k = static_cast<Eigen::Index>(kt.mode);
    const Eigen::Index kd = k + n;
    const cplx lam = kt.lambda;
    // K(b) = i L b^dag b b,  K(b^dag) = -i L b^dag b^dag b
    const Eigen::Index opb[3] = {kd, k, k};
    const Eigen::Index opbd[3] = {kd, kd, k};
    cplx km = 0.0;
    if (opts_.cumulant_feedback) km = I * lam * mom3(kd, k, k);
    else km = I * lam * std::norm(m(k)) * m(k);
    dm(k) += km;
    dm(kd) += std::conj(km);

    for (Eigen::Index q = 0; q < n; ++q) {
      for (Eigen::Index p = 0; p < 2 * n; ++p) {
        cplx add = 0.0;
        if (p == k) add += I * lam * cov31(opb, q);
        else if (p == kd) add += -I * lam * cov31(opbd, q);
        if (q == k) add += I * lam * cov13(p, opb);
        if (add != 0.0) dc(p, q) += add;
      }
    }
  }
}

void Model::add_backaction_doubled(const CMat& c, CMat& dc) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  for (const auto& ch : chain_.channels) {
    const Eigen::Index k = static_cast<Eigen::Index>(ch.mode);
    // u_p = C_{o_p b_k}, v_p = C_{b_k^dag o_p}
    const double g = ch.gamma;
    for (Eigen::Index q = 0; q < n; ++q) {
      const cplx vq = g * c(q, n + k), uq = g * c(q, k);
      for (Eigen::Index p = 0; p < 2 * n; ++p) dc(p, q) -= c(p, k) * vq + c(p, n + k) * uq;
    }
  }
}

void Model::innovation_doubled(const CMat& c, std::size_t channel, CVec& xi_x, CVec& xi_p) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  const auto& ch = chain_.channels.at(channel);
  const Eigen::Index k = static_cast<Eigen::Index>(ch.mode);
  const double s = std::sqrt(ch.gamma / 2.0);
  xi_x = s * (c.col(k).head(n) + c.col(n + k).head(n));
  xi_p = I * s * (c.col(n + k).head(n) - c.col(k).head(n));
}

namespace {

void check_dims(const CumulantState& s, const ChainSpec& chain) {
  if (s.n_modes() != chain.network.size() || s.c_bb.rows() != s.mu.size() || s.c_bdb.rows() != s.mu.size())
    throw std::invalid_argument("state dimensions do not match chain");
}

std::pair<CMat, CMat> split_dc(const CMat& dc, Eigen::Index n) {
  return {dc.topRows(n), dc.bottomRows(n)};
}

}  // namespace

CVec mean_drift(const CumulantState& s, const ChainSpec& chain, DriftOptions opts) {
  check_dims(s, chain);
  Model model(chain, opts);
  const Eigen::Index n = s.mu.size();
  CVec dm(2 * n);
  CMat dc(2 * n, n);
  model.drift_doubled(doubled_mean(s), doubled_cumulants(s), dm, dc);
  return dm.head(n);
}

std::pair<CMat, CMat> cumulant_drift(const CumulantState& s, const ChainSpec& chain) {
  check_dims(s, chain);
  Model model(chain);
  const Eigen::Index n = s.mu.size();
  CVec dm(2 * n);
  CMat dc(2 * n, n);
  model.drift_doubled(doubled_mean(s), doubled_cumulants(s), dm, dc);
  return split_dc(dc, n);
}

std::pair<CMat, CMat> measurement_backaction(const CumulantState& s, const ChainSpec& chain) {
  check_dims(s, chain);
  Model model(chain);
  const Eigen::Index n = s.mu.size();
  CMat dc = CMat::Zero(2 * n, n);
  model.add_backaction_doubled(doubled_cumulants(s), dc);
  return split_dc(dc, n);
}

std::vector<std::pair<CVec, CVec>> innovation_coefficients(const CumulantState& s, const ChainSpec& chain) {
  check_dims(s, chain);
  Model model(chain);
  const CMat c = doubled_cumulants(s);
  std::vector<std::pair<CVec, CVec>> out;
  for (std::size_t ch = 0; ch < chain.channels.size(); ++ch) {
    CVec x, p;
    model.innovation_doubled(c, ch, x, p);
    out.emplace_back(x, p);
  }
  return out;
}

std::vector<std::pair<double, double>> heterodyne_current_means(const CumulantState& s, const ChainSpec& chain) {
  check_dims(s, chain);
  std::vector<std::pair<double, double>> out;
  for (const auto& ch : chain.channels) {
    const cplx mu = s.mu[ch.mode];
    const double a = std::sqrt(ch.gamma / 2.0);
    out.emplace_back(a * 2.0 * mu.real(), a * 2.0 * mu.imag());
  }
  return out;
}

}  // namespace qrc
